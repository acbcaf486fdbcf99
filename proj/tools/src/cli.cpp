#include "linrk/cli.hpp"

#include <linrk/linrk.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace linrk {

namespace {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string problem = "dahlquist";
    std::vector<std::string> params;
    std::string method;
    std::string tableau_file;
    double atol = 1e-6;
    double rtol = 1e-6;
    double h = 0.0;
    double h0 = 0.0;
    bool fixed = false;
    double t_end = 0.0;
    std::string out;
    std::string error_mode;
    std::string jacobian = "analytic";
    std::string mode = "transformed";

    bool has_h = false;
    bool has_h0 = false;
    bool has_t_end = false;
};

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_params(const std::vector<std::string>& params) {
    KeyValues kv;
    for (const auto& p : params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("expected key=value, got '" + p + "'");
        }
        kv[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return kv;
}

double to_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != value.size()) {
        throw ConfigError("parameter '" + key + "' is not a number: '" + value + "'");
    }
    return v;
}

int to_int(const std::string& key, const std::string& value) {
    const double v = to_double(key, value);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ConfigError("parameter '" + key + "' is not an integer: '" + value + "'");
    }
    return static_cast<int>(v);
}

void reject_unknown(const KeyValues& kv, const std::vector<std::string>& allowed,
                    const std::string& context) {
    for (const auto& [k, v] : kv) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
            throw ConfigError("unknown parameter '" + k + "' for " + context);
        }
    }
}

OdeSystem make_problem(const std::string& name, const KeyValues& kv) {
    auto get = [&](const std::string& k, double fallback) {
        auto it = kv.find(k);
        return it == kv.end() ? fallback : to_double(k, it->second);
    };
    if (name == "dahlquist") {
        reject_unknown(kv, {"lambda"}, "problem 'dahlquist'");
        return make_dahlquist(get("lambda", -1.0));
    }
    if (name == "heat1d") {
        reject_unknown(kv, {"n", "d"}, "problem 'heat1d'");
        const auto it = kv.find("n");
        const int n = it == kv.end() ? 20 : to_int("n", it->second);
        return make_heat1d(n, get("d", 1.0));
    }
    if (name == "protrob") {
        reject_unknown(kv, {"lambda"}, "problem 'protrob'");
        return make_order_reduction_problem(get("lambda", -1.0));
    }
    throw ConfigError("unknown problem '" + name + "'");
}

MethodTableau resolve_method(const Options& o) {
    if (!o.tableau_file.empty()) {
        if (!o.method.empty()) throw ConfigError("give either --method or --tableau-file, not both");
        try {
            return read_tableau_file(o.tableau_file);
        } catch (const TableauParseError& e) {
            throw ConfigError(o.tableau_file + ": " + e.what());
        }
    }
    if (o.method.empty()) throw ConfigError("no method given (use --method or --tableau-file)");
    auto m = find_builtin(o.method);
    if (!m) throw ConfigError("unknown method '" + o.method + "'");
    return *m;
}

JacobianStrategy parse_jacobian(const std::string& s) {
    if (s == "analytic") return jacobian::Analytic{};
    if (s == "fd") return jacobian::ForwardDifference{};
    if (s == "lagged") return jacobian::TimeLagged{};
    if (s.rfind("frozen:", 0) == 0) {
        const int n = to_int("frozen", s.substr(7));
        if (n < 1) throw ConfigError("frozen:N needs N >= 1");
        return jacobian::Frozen{n};
    }
    throw ConfigError("unknown jacobian strategy '" + s + "'");
}

StepMode parse_mode(const std::string& s) {
    if (s == "direct") return StepMode::direct;
    if (s == "transformed") return StepMode::transformed;
    throw ConfigError("unknown mode '" + s + "'");
}

std::optional<ErrorMode> parse_error_mode(const std::string& s) {
    if (s.empty()) return std::nullopt;
    if (s == "embedded") return ErrorMode::embedded;
    if (s == "richardson") return ErrorMode::richardson;
    throw ConfigError("unknown error mode '" + s + "'");
}

/// Output stream for --out, or the fallback.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
            stream_ = file_.get();
        }
        *stream_ << std::setprecision(17);
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

void apply_t_end(const Options& o, OdeSystem& sys) {
    if (o.has_t_end) {
        if (!(o.t_end > sys.t0)) throw ConfigError("--t-end must exceed t0");
        sys.t_end = o.t_end;
    }
}

void write_trajectory(std::ostream& os, const Trajectory& tr, Index dim) {
    os << 't';
    for (Index i = 1; i <= dim; ++i) os << ",u_" << i;
    os << ",norm2\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        os << tr.times[k];
        for (Index i = 0; i < dim; ++i) os << ',' << tr.states[k](i);
        os << ',' << tr.states[k].norm() << '\n';
    }
}

/// Constant two-step run of about h; h is rounded so the steps fill the span.
Trajectory run_twostep(const OdeSystem& sys, const MethodTableau& m, double h,
                       const JacobianStrategy& jac) {
    const double span = sys.t_end - sys.t0;
    TwoStepControl ctrl;
    ctrl.n_steps = std::max(1, static_cast<int>(std::ceil(span / h - 1e-9)));
    ctrl.jacobian = jac;
    if (const auto* t = std::get_if<TwoStepWTableau>(&m)) return integrate_twostep(sys, *t, ctrl);
    return integrate_twostep(sys, std::get<PeerTableau>(m), ctrl);
}

int cmd_integrate(const Options& o, std::ostream& out) {
    OdeSystem sys = make_problem(o.problem, parse_params(o.params));
    apply_t_end(o, sys);
    const MethodTableau m = resolve_method(o);
    const JacobianStrategy jac = parse_jacobian(o.jacobian);
    const double span = sys.t_end - sys.t0;

    Trajectory tr;
    if (const auto* row = std::get_if<RowTableau>(&m)) {
        IntegrationControl ctrl;
        ctrl.atol = o.atol;
        ctrl.rtol = o.rtol;
        ctrl.fixed_step = o.fixed;
        if (o.has_h) {
            ctrl.h0 = o.h;
        } else if (o.has_h0) {
            ctrl.h0 = o.h0;
        }
        ctrl.error_mode = parse_error_mode(o.error_mode);
        ctrl.jacobian = jac;
        ctrl.mode = parse_mode(o.mode);
        tr = integrate(sys, *row, ctrl);
    } else {
        parse_mode(o.mode);
        const double h = o.has_h    ? o.h
                         : o.has_h0 ? o.h0
                                                 : span / 100.0;
        if (!(h > 0.0)) throw ConfigError("--h must be positive");
        tr = run_twostep(sys, m, h, jac);
    }
    Sink sink(o.out, out);
    write_trajectory(*sink, tr, sys.dim);
    return exit_ok;
}

int cmd_converge(const Options& o, std::ostream& out) {
    OdeSystem sys = make_problem(o.problem, parse_params(o.params));
    apply_t_end(o, sys);
    const MethodTableau m = resolve_method(o);
    const JacobianStrategy jac = parse_jacobian(o.jacobian);
    const StepMode mode = parse_mode(o.mode);
    if (!sys.has_exact()) throw ConfigError("problem '" + o.problem + "' has no reference solution");
    const double span = sys.t_end - sys.t0;
    const double h_start = o.has_h ? o.h : span / 8.0;
    if (!(h_start > 0.0)) throw ConfigError("--h must be positive");

    auto run = [&](double h) -> Vector {
        if (const auto* row = std::get_if<RowTableau>(&m)) {
            IntegrationControl ctrl;
            ctrl.fixed_step = true;
            ctrl.h0 = h;
            ctrl.jacobian = jac;
            ctrl.mode = mode;
            return integrate(sys, *row, ctrl).final_state();
        }
        return run_twostep(sys, m, h, jac).final_state();
    };
    const auto steps = halving_sequence(h_start, 6);
    const auto pts = convergence_study(run, sys.exact(sys.t_end), steps);

    Sink sink(o.out, out);
    *sink << "h,error,observed_order\n";
    for (const auto& p : pts) {
        *sink << p.h << ',' << p.error << ',';
        if (std::isnan(p.observed_order)) {
            *sink << "nan";
        } else {
            *sink << p.observed_order;
        }
        *sink << '\n';
    }
    return exit_ok;
}

std::optional<StabilityKind> stability_kind(const Options& o) {
    if (o.tableau_file.empty()) {
        if (o.method == "CN") return CrankNicolson{};
        if (o.method.rfind("ERK", 0) == 0 && o.method.size() > 3) {
            const int p = to_int("ERK order", o.method.substr(3));
            if (p < 1) throw ConfigError("ERK order must be at least 1");
            return ExplicitRkPolynomial{p, {}};
        }
    }
    const MethodTableau m = resolve_method(o);
    if (const auto* row = std::get_if<RowTableau>(&m)) return *row;
    return std::nullopt;
}

std::string format_complex(Complex c) {
    std::ostringstream os;
    os << std::setprecision(17);
    if (is_infinite(c)) {
        os << "inf";
    } else if (c.imag() == 0.0) {
        os << c.real();
    } else {
        os << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << 'i';
    }
    return os.str();
}

int cmd_stability(const Options& o, std::ostream& out) {
    const KeyValues kv = parse_params(o.params);
    reject_unknown(kv, {"re_min", "re_max", "im_min", "im_max", "nx", "ny"}, "stability");
    const auto kind = stability_kind(o);
    if (!kind) throw ConfigError("stability analysis needs a one-step method, got '" + o.method + "'");

    const StabilityReport rep = classify(*kind);
    out << std::setprecision(17);
    out << "method: " << (o.tableau_file.empty() ? o.method : o.tableau_file) << '\n';
    out << "r_infinity: " << format_complex(rep.r_infinity) << '\n';
    out << "a_stable: " << std::boolalpha << rep.a_stable << '\n';
    out << "l_stable: " << rep.l_stable << '\n';
    out << "alpha_deg: " << rep.alpha_deg << '\n';
    out << "scan: n_rays=" << rep.scan.n_rays << " n_radii=" << rep.scan.n_radii
        << " r_max=" << rep.scan.r_max << " tol=" << rep.scan.tol << '\n';

    if (!o.out.empty()) {
        RegionGrid g;
        auto get = [&](const char* k, double fallback) {
            auto it = kv.find(k);
            return it == kv.end() ? fallback : to_double(k, it->second);
        };
        g.re_min = get("re_min", g.re_min);
        g.re_max = get("re_max", g.re_max);
        g.im_min = get("im_min", g.im_min);
        g.im_max = get("im_max", g.im_max);
        if (auto it = kv.find("nx"); it != kv.end()) g.nx = to_int("nx", it->second);
        if (auto it = kv.find("ny"); it != kv.end()) g.ny = to_int("ny", it->second);
        const auto samples = region_scan(*kind, g);
        Sink sink(o.out, out);
        *sink << "re,im,abs_r\n";
        for (const auto& s : samples) {
            *sink << s.re << ',' << s.im << ',';
            if (std::isinf(s.abs_r)) {
                *sink << "inf";
            } else {
                *sink << s.abs_r;
            }
            *sink << '\n';
        }
    }
    return exit_ok;
}

int cmd_list(const Options& o, std::ostream& out) {
    Sink sink(o.out, out);
    *sink << "name,family,stages,order,embedded_order,a_stable,l_stable,r_infinity,alpha_deg\n";
    for (const auto& m : builtin_methods()) {
        std::visit(
            [&](const auto& t) {
                using T = std::decay_t<decltype(t)>;
                *sink << t.name << ',';
                if constexpr (std::is_same_v<T, RowTableau>) {
                    const auto rep = classify(t);
                    *sink << "row," << t.stages() << ',' << t.order << ',';
                    if (t.embedded_order) {
                        *sink << *t.embedded_order;
                    } else {
                        *sink << '-';
                    }
                    *sink << ',' << std::boolalpha << rep.a_stable << ',' << rep.l_stable << ','
                          << format_complex(rep.r_infinity) << ',' << rep.alpha_deg << '\n';
                } else {
                    const char* family = std::is_same_v<T, PeerTableau> ? "peer" : "two-step-w";
                    *sink << family << ',' << t.stages() << ',' << t.order << ",-,-,-,-,-\n";
                }
            },
            m);
    }
    return exit_ok;
}

void add_method_options(CLI::App* sub, Options& o) {
    sub->add_option("--method", o.method, "Builtin method name");
    sub->add_option("--tableau-file", o.tableau_file, "One-step tableau file");
}

void add_run_options(CLI::App* sub, Options& o) {
    sub->set_help_flag("--help", "Print this help message and exit");
    sub->add_option("--problem", o.problem, "dahlquist, heat1d or protrob");
    sub->add_option("params", o.params, "Problem parameters as key=value");
    add_method_options(sub, o);
    sub->add_option("--h", o.h, "Constant step (fixed) or initial step");
    sub->add_option("--t-end", o.t_end, "End of the time span");
    sub->add_option("--out", o.out, "Output CSV path");
    sub->add_option("--jacobian", o.jacobian, "analytic, fd, frozen:N or lagged");
    sub->add_option("--mode", o.mode, "direct or transformed");
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Linearly implicit Runge-Kutta integrators and stability analysis", "linrk"};
    app.require_subcommand(1, 1);

    auto* integ = app.add_subcommand("integrate", "Integrate a problem, write the trajectory CSV");
    add_run_options(integ, o);
    integ->add_option("--atol", o.atol, "Absolute tolerance");
    integ->add_option("--rtol", o.rtol, "Relative tolerance");
    integ->add_option("--h0", o.h0, "Initial step of the adaptive run");
    integ->add_flag("--fixed", o.fixed, "Disable step-size control");
    integ->add_option("--error-mode", o.error_mode, "embedded or richardson");

    auto* conv = app.add_subcommand("converge", "Step-halving convergence study");
    add_run_options(conv, o);

    auto* stab = app.add_subcommand("stability", "Classify a stability function");
    add_method_options(stab, o);
    stab->add_option("params", o.params, "Region grid as key=value");
    stab->add_option("--out", o.out, "Region scan CSV path");

    auto* list = app.add_subcommand("list-methods", "Catalog of builtin methods");
    list->add_option("--out", o.out, "Output CSV path");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_config;
    }
    for (auto* sub : {integ, conv}) {
        if (!sub->parsed()) continue;
        o.has_h = sub->count("--h") > 0;
        o.has_t_end = sub->count("--t-end") > 0;
        o.has_h0 = sub == integ && sub->count("--h0") > 0;
    }

    try {
        if (integ->parsed()) return cmd_integrate(o, out);
        if (conv->parsed()) return cmd_converge(o, out);
        if (stab->parsed()) return cmd_stability(o, out);
        return cmd_list(o, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const StructuralError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const IntegrationFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        err << std::setprecision(17) << "last state: t=" << e.time() << " u=[";
        for (Index i = 0; i < e.state().size(); ++i) err << (i ? "," : "") << e.state()(i);
        err << "]\n";
        return exit_numerical;
    } catch (const std::runtime_error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
}

}  // namespace linrk

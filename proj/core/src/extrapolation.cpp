#include "linrk/extrapolation.hpp"

#include "linrk/builtin.hpp"
#include "linrk/errors.hpp"
#include "linrk/onestep.hpp"

#include <string>

namespace linrk {

Vector lie_fixed_steps(const OdeSystem& sys, const Vector& u0, double t0, double t_end, int n,
                       const JacobianStrategy& strategy) {
    if (n < 1) throw ArgumentError("lie_fixed_steps: n must be at least 1");
    if (!(t_end > t0)) throw ArgumentError("lie_fixed_steps: t_end must exceed t0");
    OdeSystem run = sys;
    run.t0 = t0;
    run.t_end = t_end;
    run.u0 = u0;
    IntegrationControl ctrl;
    ctrl.fixed_step = true;
    ctrl.h0 = (t_end - t0) / n;
    ctrl.jacobian = strategy;
    ctrl.max_steps = static_cast<std::size_t>(n) + 1;
    return integrate(run, lie1(), ctrl).final_state();
}

ExtrapolationTable extrapolate_lie(const OdeSystem& sys, const Vector& u0, double t0,
                                   double t_end, int base_steps, int columns,
                                   const JacobianStrategy& strategy) {
    if (base_steps < 1) throw ArgumentError("extrapolate_lie: base_steps must be at least 1");
    if (columns < 1 || columns > 4) {
        throw ArgumentError("extrapolate_lie: columns must be in 1..4, got " + std::to_string(columns));
    }
    ExtrapolationTable table;
    for (int j = 0; j < columns; ++j) {
        const int nj = (j + 1) * base_steps;
        table.substeps.push_back(nj);
        std::vector<Vector> row;
        row.push_back(lie_fixed_steps(sys, u0, t0, t_end, nj, strategy));
        for (int k = 1; k <= j; ++k) {
            const auto& prev = table.entries[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k - 1)];
            const Vector& cur = row[static_cast<std::size_t>(k - 1)];
            const double ratio =
                static_cast<double>(nj) / table.substeps[static_cast<std::size_t>(j - k)];
            row.push_back(cur + (cur - prev) / (ratio - 1.0));
        }
        table.entries.push_back(std::move(row));
    }
    return table;
}

}  // namespace linrk

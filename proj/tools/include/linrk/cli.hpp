#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace linrk {

/// Exit codes of cli_main.
enum ExitCode : int {
    exit_ok = 0,
    exit_numerical = 1,
    exit_config = 2,
};

/// Runs one subcommand. args excludes the program name.
///
///   integrate     trajectory CSV  t,u_1..u_dim,norm2
///   converge      step-halving CSV  h,error,observed_order
///   stability     report text, region CSV re,im,abs_r with --out
///   list-methods  catalog CSV
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace linrk

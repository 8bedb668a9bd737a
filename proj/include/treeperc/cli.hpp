#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace treeperc::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidation = 2,
    kNonConvergence = 3,
    kCheckFailed = 4,
};

/// Fully resolved settings for one invocation. Every artifact embeds it.
struct RunConfig {
    std::string command;

    int d = 2;
    double u = 0.0;
    double a = 0.0;
    double rho = 0.5;
    int n = 10;
    int K = 6;
    int buffer = 3;
    int dom_n = 8;
    std::uint64_t trials = 100000;
    int fit_from = 6;
    int fit_to = 12;

    int node_count = 400;
    double M = 8.0;
    double eps = 1e-3;

    int samples = 40;  ///< critical-line samples
    int grid_u = 25;
    int grid_a = 25;
    double u_max = -1.0;  ///< negative: 1.25 u_*
    double a_min = -1.0;
    double a_max = 2.0;
    int spot = 0;         ///< Monte Carlo spot checks per region in `diagram`

    std::uint64_t seed = 0;
    int workers = 1;
    std::string out_dir = ".";
    std::string config_file;

    std::map<std::string, std::string> config_entries;  ///< raw key=value pairs read from config_file
    std::map<std::string, std::string> sources;         ///< option -> flag | config | default
};

/// Parses argv (argv[0] is the program name), runs the subcommand, writes
/// artifacts under out_dir and returns an ExitCode.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

/// Version string embedded in artifacts.
const char* tool_version();

}  // namespace treeperc::cli

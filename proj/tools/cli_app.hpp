#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace recest::cli {

// Exit codes shared by every subcommand:
//   0 success, 1 usage error, 2 condition violated (check only),
//   3 numeric failure. No other codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolated = 2;
inline constexpr int kExitNumeric = 3;

struct SimulateConfig {
    std::string model = "cauchy";
    double theta = 1.0;
    double theta0 = 0.0;
    long t_max = 100;
    std::uint64_t seed = 42;
    std::string format = "csv";
};

struct RateConfig {
    std::string model = "cauchy";
    double theta = 1.0;
    double theta0 = 0.0;
    long t_max = 10000;
    int reps = 500;
    std::vector<long> checkpoints;  // empty: standard half-decade defaults
    double delta = 0.4;
    std::uint64_t seed = 42;
    int threads = 0;
    std::string a_choice;  // "t" | "H"; empty: per-model default
    std::string format = "json";
};

struct CheckConfig {
    std::string model = "cauchy";
    std::string condition = "B1";
    double c = 1.0;
    double u_min = 0.0;  // 0: symmetric grid [-u_max, u_max]
    double u_max = 1.0;
    int grid_n = 41;
    double bound = 100.0;
    double theta = 0.5;
    double theta0 = 0.0;
    long t_max = 1000;
    std::uint64_t seed = 42;
    double epsilon = 0.5;
    double eps_tilde = 0.05;
};

struct OracleConfig {
    std::string model = "cauchy";
    std::string quantity = "b";
    double u = 1.0;
    double tol = 1e-6;
};

struct KtraceConfig {
    std::string model = "cauchy";
    double theta = 1.0;
    double theta0 = 0.0;
    long t_max = 1000;
    std::uint64_t seed = 42;
    double delta = 0.4;
    double c = 1.0;
    std::string a_choice;  // "t" | "H"; empty: per-model default
};

// Each run_* validates, computes, and fills `out` with the full file
// contents; the returned exit code follows the table above.
int run_simulate(const SimulateConfig& cfg, std::string& out);
int run_rate(const RateConfig& cfg, std::string& out);
int run_check(const CheckConfig& cfg, std::string& out);
int run_oracle(const OracleConfig& cfg, std::string& out);
int run_ktrace(const KtraceConfig& cfg, std::string& out);

/// Full command line: parse, run, write to --out or stdout.
int dispatch(int argc, char** argv);

} // namespace recest::cli

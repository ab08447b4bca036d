#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "specmix/error.hpp"
#include "specmix/run.hpp"

namespace {

void print_record(const std::string& code, const std::string& message) {
    specmix::Json rec = {{"error", {{"code", code}, {"message", message}}}};
    std::cerr << rec.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact-arithmetic construction and verification of mixing/rigidity "
                 "spectral measures"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out;
    double eps = 0.0;
    long long jobs = 0;
    std::uint64_t seed = 0;

    const struct {
        const char* name;
        const char* help;
    } commands[] = {
        {"construct-poly", "digit measures for a polynomial family, solved profile by profile"},
        {"construct-general", "searched frequencies and anchor for an independent family"},
        {"construct-primes", "prime-exponent measures covering every profile at once"},
        {"verify", "re-run a finished output directory and byte-compare the artifacts"},
        {"weyl", "exponential-sum survey of a family's torus orbit"},
        {"interpolate", "glue grid automorphisms and check the convex correlation identity"},
        {"wiener", "averaged squared Fourier coefficients of a stored measure"},
    };
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out, "output directory (overrides the config)");
        sub->add_option("--eps", eps, "float error budget (overrides the config)");
        sub->add_option("--jobs", jobs, "worker count (overrides the config)");
        sub->add_option("--seed", seed, "RNG seed (overrides the config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        print_record("usage-error", e.what());
        return 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        specmix::RunConfig cfg = specmix::load_config(config_path, sub->get_name());
        if (sub->count("--out")) cfg.out_dir = out;
        if (sub->count("--eps")) {
            if (eps <= 0) {
                print_record("validation-error", "eps must be positive");
                return 1;
            }
            cfg.eps = eps;
        }
        if (sub->count("--jobs")) {
            if (jobs < 1) {
                print_record("validation-error", "parallelism must be at least 1");
                return 1;
            }
            cfg.jobs = static_cast<unsigned>(jobs);
        }
        if (sub->count("--seed")) cfg.seed = seed;
        return specmix::run(cfg, std::cerr);
    } catch (const specmix::Error& e) {
        print_record(e.code(), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_record("internal-error", e.what());
        return 1;
    }
}

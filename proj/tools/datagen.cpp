// Writes the bundled synthetic citation benchmarks (.content/.cites pairs).

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "emlouv/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"synthetic citation benchmark generator"};

    std::string dir = "data";
    std::string preset = "both";
    std::uint64_t seed = 42;
    app.add_option("--dir", dir, "output directory")->capture_default_str();
    app.add_option("--preset", preset, "which benchmark to write")
        ->check(CLI::IsMember({"cora", "citeseer", "both"}))
        ->capture_default_str();
    app.add_option("--seed", seed, "generator seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (preset == "cora" || preset == "both") {
            const auto f = emlouv::synthetic::write_benchmark(emlouv::synthetic::cora_like(), dir, seed);
            std::cout << f.content_path << '\n' << f.cites_path << '\n';
        }
        if (preset == "citeseer" || preset == "both") {
            const auto f =
                emlouv::synthetic::write_benchmark(emlouv::synthetic::citeseer_like(), dir, seed);
            std::cout << f.content_path << '\n' << f.cites_path << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

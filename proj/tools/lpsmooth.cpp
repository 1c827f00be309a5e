#include <lpsmooth/cli.hpp>

int main(int argc, char** argv) {
    try {
        return lpsmooth::cli::run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

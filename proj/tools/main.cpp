#include "cli_app.hpp"

int main(int argc, char** argv) {
    stra::cli::CliApp app;
    return app.run(argc, argv);
}

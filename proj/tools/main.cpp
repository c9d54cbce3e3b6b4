#include "cli_app.hpp"

int main(int argc, char** argv) {
    return recest::cli::dispatch(argc, argv);
}

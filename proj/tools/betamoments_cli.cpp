#include "cli_app.hpp"

int main(int argc, char** argv) { return betamoments::cli::run(argc, argv); }

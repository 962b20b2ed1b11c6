#include "otmisfit_app/app.hpp"

int main(int argc, char** argv) { return otm::app::run_cli(argc, argv); }

// Command-line front end. Subcommands: hardness (balanced scenarios or an
// in-training lambda scan), features (feature-space comparison), spy
// (base vs spy systems), crossdomain, sensitivity (grid diagnostics), synth
// (corpus generation), inspect (corpus summary and vocabulary/divergence
// dumps). Exit status: 0 success, 1 runtime failure, 2 usage error.
#ifndef SOCKVERIF_CLI_HPP
#define SOCKVERIF_CLI_HPP

namespace sockverif {

int run_cli(int argc, const char* const* argv);

}  // namespace sockverif

#endif

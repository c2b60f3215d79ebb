#ifndef CAUSAL_CPD_TOOLS_CLI_HPP
#define CAUSAL_CPD_TOOLS_CLI_HPP

namespace ccpd::cli {

/// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
int run(int argc, char** argv);

}  // namespace ccpd::cli

#endif  // CAUSAL_CPD_TOOLS_CLI_HPP

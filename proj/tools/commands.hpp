#pragma once

#include <string>

#include "config.hpp"

namespace trisphere::cli {

struct Context {
  RunConfig cfg;
  std::string out_dir = "out";
  unsigned jobs = 1;

  std::string path(const std::string& name) const;
};

/// "0.06" -> "pe0.06"; shortest round-trip text of the value.
std::string pe_tag(double pe);

/// Each command returns the process exit code.
int cmd_validate(const Context& ctx);
int cmd_sherwood(const Context& ctx);
int cmd_transient(const Context& ctx);
int cmd_generate(const Context& ctx);
int cmd_learn(const Context& ctx);
int cmd_fit_surrogate(const Context& ctx);
int cmd_surrogate_learn(const Context& ctx);

}  // namespace trisphere::cli

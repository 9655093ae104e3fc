#pragma once

// Canonical instance document: {"k":int,"s":int,"c":[int],"n":int,"y":[int]}.
// Integers may also be given as decimal strings; they are never floats.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diagline/bigint.hpp"
#include "diagline/core.hpp"

namespace diagline {

struct Instance {
  int k = 0;
  std::vector<std::int64_t> c;
  BigInt n = 0;
  std::vector<std::int64_t> y;

  int s() const noexcept { return static_cast<int>(c.size()); }

  DiagonalForm form() const { return DiagonalForm(k, c, n); }
  BasePoint base_point() const { return BasePoint{y}; }

  // Strict system (verifies y against n).
  LineSystem line_system() const { return LineSystem::build(form(), base_point()); }
  // Relaxed system (any nonzero c, y; n unused).
  LineSystem relaxed_system() const { return LineSystem::relaxed(k, c, y); }

  std::string digest() const;
};

Instance instance_from_json(const nlohmann::json& doc);
nlohmann::json instance_to_json(const Instance& inst);
Instance load_instance(const std::string& path);

// k=3, s=12, c=(1^6,(-1)^6), y=(2,1,...,1), n=7.
Instance flagship_instance();

// Named instances: "flagship"; "chain" (k=1, c=(1,-1), y=(1,1));
// "quadratic6" (k=2, c=(1,1,1,-1,-1,-1), y=(1,1,1,1,1,2), n=-3);
// "singular3" (k=2, c=(1,1,-2), y=(1,1,1)). chain and singular3 have n = 0
// and only admit the relaxed system.
std::optional<Instance> preset_instance(const std::string& name);

}  // namespace diagline

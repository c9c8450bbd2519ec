#pragma once

#include "privmdp/mdp.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace privmdp {

/// JSON model document:
///
///   { "states":   ["s0", ...],
///     "actions":  {"s0": ["a0", ...], ...},
///     "rewards":  {"s0|a0": 0.5, ...},
///     "kernel":   {"s0|a0": [p(s0), p(s1), ...], ...},
///     "horizon":  {"finite": T} | "infinite",
///     "discount": gamma,
///     "terminal": {"s0": 0.0, ...} }
///
/// Kernel rows list next-state probabilities in "states" order. "terminal"
/// may be omitted for infinite horizons.
std::string mdp_to_json(const Mdp& m);
Mdp mdp_from_json(std::string_view text);

Mdp load_mdp(const std::filesystem::path& path);
void save_mdp(const Mdp& m, const std::filesystem::path& path);

}  // namespace privmdp

#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "cusplab/signal_models.hpp"

namespace cusplab {

/// Builds a signal from its config description, e.g.
///   {"family": "cusp", "a": 1, "kappa": 0.25, "T": 1, "theta_bounds": [0.25, 0.75]}
/// Unknown family, smooth-entry or nuisance names raise DomainError listing
/// the valid names.
SignalPtr signal_from_json(const nlohmann::json& spec);

/// Same as signal_from_json but requires a smooth family and keeps its type.
std::shared_ptr<const SmoothSignal> smooth_signal_from_json(const nlohmann::json& spec);

/// Same as signal_from_json but requires a (one-term) cusp family.
std::shared_ptr<const CuspSignal> cusp_signal_from_json(const nlohmann::json& spec);

Nuisance nuisance_from_json(const nlohmann::json& spec);

std::vector<std::string> signal_family_names();
std::vector<std::string> smooth_entry_names();
std::vector<std::string> nuisance_names();

}  // namespace cusplab

#include "cusplab/signal_catalog.hpp"

#include <sstream>

#include "cusplab/errors.hpp"

namespace cusplab {
namespace {

using nlohmann::json;

std::string joined(const std::vector<std::string>& names) {
  std::ostringstream out;
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : "") << names[i];
  return out.str();
}

double number(const json& spec, const char* key) {
  if (!spec.contains(key)) throw DomainError(std::string("signal field '") + key + "' is missing");
  const auto& v = spec.at(key);
  if (!v.is_number()) throw DomainError(std::string("signal field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& spec, const char* key, double fallback) {
  return spec.contains(key) ? number(spec, key) : fallback;
}

ThetaBounds bounds_of(const json& spec) {
  if (!spec.contains("theta_bounds")) throw DomainError("signal field 'theta_bounds' is missing");
  const auto& b = spec.at("theta_bounds");
  if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
    throw DomainError("signal field 'theta_bounds' must be a [lower, upper] pair");
  }
  return {b[0].get<double>(), b[1].get<double>()};
}

std::string name_of(const json& spec, const char* key) {
  if (!spec.contains(key) || !spec.at(key).is_string()) {
    throw DomainError(std::string("signal field '") + key + "' must be a string");
  }
  return spec.at(key).get<std::string>();
}

}  // namespace

std::vector<std::string> signal_family_names() {
  return {"cusp", "multi-cusp", "two-sided-cusp", "smooth", "signum"};
}

std::vector<std::string> smooth_entry_names() {
  return {"constant", "quadratic", "cosine", "smoothed-cusp"};
}

std::vector<std::string> nuisance_names() { return {"none", "linear", "sine"}; }

Nuisance nuisance_from_json(const json& spec) {
  if (spec.is_null()) return Nuisance::none();
  const std::string name = name_of(spec, "name");
  if (name == "none") return Nuisance::none();
  if (name == "linear") return Nuisance::linear(number(spec, "c"));
  if (name == "sine") return Nuisance::sine(number(spec, "c"), number(spec, "omega"));
  throw DomainError("unknown nuisance '" + name + "'; valid: " + joined(nuisance_names()));
}

std::shared_ptr<const SmoothSignal> smooth_signal_from_json(const json& spec) {
  const std::string family = name_of(spec, "family");
  if (family != "smooth") throw DomainError("expected a smooth signal, got family '" + family + "'");
  const double T = number(spec, "T");
  const ThetaBounds bounds = bounds_of(spec);
  const std::string entry = name_of(spec, "entry");
  if (entry == "constant") {
    return std::make_shared<SmoothSignal>(SmoothSignal::constant(number(spec, "c"), T, bounds));
  }
  if (entry == "quadratic") {
    return std::make_shared<SmoothSignal>(SmoothSignal::quadratic(
        number_or(spec, "c0", 0.0), number_or(spec, "c1", 0.0), number_or(spec, "c2", 0.0), T,
        bounds));
  }
  if (entry == "cosine") {
    return std::make_shared<SmoothSignal>(SmoothSignal::cosine(
        number_or(spec, "c0", 0.0), number(spec, "c1"), number(spec, "omega"), T, bounds));
  }
  if (entry == "smoothed-cusp") {
    return std::make_shared<SmoothSignal>(SmoothSignal::smoothed_cusp(
        number(spec, "a"), number(spec, "kappa"), number(spec, "delta"), T, bounds));
  }
  throw DomainError("unknown smooth signal entry '" + entry + "'; valid: " +
                    joined(smooth_entry_names()));
}

std::shared_ptr<const CuspSignal> cusp_signal_from_json(const json& spec) {
  const std::string family = name_of(spec, "family");
  if (family != "cusp") throw DomainError("expected a cusp signal, got family '" + family + "'");
  return std::make_shared<CuspSignal>(number(spec, "a"), number(spec, "kappa"), number(spec, "T"),
                                      bounds_of(spec),
                                      nuisance_from_json(spec.value("nuisance", json())));
}

SignalPtr signal_from_json(const json& spec) {
  if (!spec.is_object()) throw DomainError("signal description must be a JSON object");
  const std::string family = name_of(spec, "family");
  if (family == "cusp") return cusp_signal_from_json(spec);
  if (family == "smooth") return smooth_signal_from_json(spec);
  const double T = number(spec, "T");
  const ThetaBounds bounds = bounds_of(spec);
  if (family == "multi-cusp") {
    if (!spec.contains("terms") || !spec.at("terms").is_array()) {
      throw DomainError("multi-cusp signal needs a 'terms' array");
    }
    std::vector<CuspTerm> terms;
    for (const auto& term : spec.at("terms")) terms.push_back({number(term, "a"), number(term, "kappa")});
    return std::make_shared<MultiCuspSignal>(std::move(terms), T, bounds);
  }
  if (family == "two-sided-cusp") {
    return std::make_shared<TwoSidedCuspSignal>(number(spec, "a"), number(spec, "b"),
                                                number(spec, "kappa"), T, bounds,
                                                nuisance_from_json(spec.value("nuisance", json())));
  }
  if (family == "signum") return std::make_shared<SignumSignal>(number(spec, "a"), T, bounds);
  throw DomainError("unknown signal family '" + family + "'; valid: " + joined(signal_family_names()));
}

}  // namespace cusplab

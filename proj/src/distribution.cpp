#include "sata/distribution.hpp"

#include <cmath>
#include <stdexcept>

namespace sata {

double OptionDistribution::prob_of(const std::string& id) const {
  for (size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return probs[i];
  throw std::out_of_range("distribution has no id '" + id + "'");
}

size_t OptionDistribution::argmax() const {
  if (probs.empty()) throw std::logic_error("argmax of empty distribution");
  size_t best = 0;
  for (size_t i = 1; i < probs.size(); ++i)
    if (probs[i] > probs[best]) best = i;
  return best;
}

void OptionDistribution::renormalize() {
  double total = 0.0;
  for (double p : probs) total += p;
  if (total <= 0.0) throw std::runtime_error("distribution has no mass");
  for (double& p : probs) p /= total;
}

void OptionDistribution::check() const {
  if (ids.size() != probs.size()) throw std::logic_error("distribution ids/probs size mismatch");
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0 || !std::isfinite(p)) throw std::logic_error("distribution has invalid entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::logic_error("distribution does not sum to 1");
}

}  // namespace sata

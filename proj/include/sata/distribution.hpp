#pragma once

#include <string>
#include <vector>

namespace sata {

// Probability vector over the ids shown in one prompt (NOTA included when
// present). Always renormalized to sum 1; `coverage` keeps the raw mass that
// was actually found on id tokens, and ids that had to be floored because the
// model put no mass on them are listed in `floored`.
struct OptionDistribution {
  std::vector<std::string> ids;  // prompt order
  std::vector<double> probs;
  double coverage = 1.0;
  std::vector<std::string> floored;

  double prob_of(const std::string& id) const;
  size_t argmax() const;
  void renormalize();
  void check() const;  // throws unless sizes match and probs sum to 1 +- 1e-9
};

struct BinaryDistribution {
  double p_yes = 0.5;
  double p_no = 0.5;
  bool covered = true;  // false when neither answer token carried mass
};

}  // namespace sata

#pragma once

#include <stdexcept>
#include <string>

namespace trunclap {

// No supersolution exists; `tag` names the triggering condition (e.g. "bR>=k").
class NonexistenceThreshold : public std::runtime_error {
 public:
  NonexistenceThreshold(std::string tag, std::string citation, double radius)
      : std::runtime_error("nonexistence (" + tag + "): " + citation),
        tag_(std::move(tag)),
        citation_(std::move(citation)),
        radius_(radius) {}

  const std::string& tag() const { return tag_; }
  const std::string& citation() const { return citation_; }
  // Radius of the ball on which nonexistence is asserted.
  double radius() const { return radius_; }

 private:
  std::string tag_;
  std::string citation_;
  double radius_;
};

class HypothesisViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Predicate gave inconsistent answers while bracketing.
class BracketFailure : public std::runtime_error {
 public:
  BracketFailure(const std::string& what, std::string log)
      : std::runtime_error(what), log_(std::move(log)) {}
  const std::string& log() const { return log_; }

 private:
  std::string log_;
};

inline constexpr const char* kBallThresholdCitation =
    "if bR >= k there are no supersolutions";
inline constexpr const char* kDivergentIntegralCitation =
    "integral of r/(k - r b(r)) up to R0 diverges: no supersolutions in B_R0";

}  // namespace trunclap

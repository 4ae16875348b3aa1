#ifndef QROT_ERRORS_H_
#define QROT_ERRORS_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace qrot {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a raw instance (or a request against one) is malformed. The
// message always names the offending field, e.g. "nonpositive weight at mu[1]".
class InstanceError : public Error {
 public:
  enum class Kind {
    kDimensionMismatch,
    kNonpositiveWeight,
    kNonfiniteValue,
    kNonpositiveEpsilon,
    kNotSymmetric,
    kNonzeroCost,
    kUnsorted,
  };

  InstanceError(Kind kind, std::string field,
                std::optional<std::size_t> index = std::nullopt,
                std::string detail = {});

  Kind kind() const { return kind_; }
  const std::string& field() const { return field_; }
  const std::optional<std::size_t>& index() const { return index_; }

 private:
  Kind kind_;
  std::string field_;
  std::optional<std::size_t> index_;
};

const char* to_string(InstanceError::Kind kind);

}  // namespace qrot

#endif  // QROT_ERRORS_H_

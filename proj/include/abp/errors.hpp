#pragma once

#include <stdexcept>
#include <string>

namespace abp {

// Exit-code classes used by the CLI: validation problems (bad inputs, bad
// parameters, malformed files) count as usage errors and map to 2;
// resource-cap refusals (state spaces, trees, or supports beyond configured
// limits) map to 3. Internal self-check breaches are raised as
// std::logic_error and map to 4.
enum class ErrorClass { validation = 2, resource_cap = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string msg) : std::runtime_error(std::move(msg)), cls_(cls) {}
  ErrorClass error_class() const { return cls_; }

 private:
  ErrorClass cls_;
};

inline Error validation_error(std::string msg) {
  return Error(ErrorClass::validation, std::move(msg));
}
inline Error resource_cap_error(std::string msg) {
  return Error(ErrorClass::resource_cap, std::move(msg));
}

}  // namespace abp

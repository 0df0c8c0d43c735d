#ifndef SEMCEPT_VERSION_HPP
#define SEMCEPT_VERSION_HPP

namespace semcept {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace semcept

#endif  // SEMCEPT_VERSION_HPP

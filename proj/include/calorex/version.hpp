#ifndef CALOREX_VERSION_HPP
#define CALOREX_VERSION_HPP

namespace calorex {
inline constexpr const char* kVersion = "0.1.0";
}

#endif  // CALOREX_VERSION_HPP

#ifndef COVPROJ_VERSION_HPP
#define COVPROJ_VERSION_HPP

namespace covproj {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace covproj

#endif

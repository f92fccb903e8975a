#pragma once

#define COHERENCE_VERSION "0.1.0"

namespace coherence {

inline constexpr const char* version = COHERENCE_VERSION;

}  // namespace coherence

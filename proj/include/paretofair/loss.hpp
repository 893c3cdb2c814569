#pragma once

#include <string>

#include "paretofair/errors.hpp"

namespace paretofair {

enum class Loss { BrierScore, CrossEntropy };

inline const char* loss_name(Loss loss) {
  return loss == Loss::BrierScore ? "bs" : "ce";
}

// Accepts "bs" or "ce".
inline Loss parse_loss(const std::string& name) {
  if (name == "bs") return Loss::BrierScore;
  if (name == "ce") return Loss::CrossEntropy;
  throw ConfigError("unknown loss '" + name + "', expected bs or ce");
}

}  // namespace paretofair

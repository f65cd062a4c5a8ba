#include "greycone/phase.hpp"

namespace greycone {

std::string_view phase_kind_name(PhaseKind k) {
  return k == PhaseKind::Fuzz ? "fuzz" : "conc";
}

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Stalled: return "stalled";
    case StopReason::Budget: return "budget";
    case StopReason::Target: return "target";
    case StopReason::Exhausted: return "exhausted";
    case StopReason::Cutoff: return "cutoff";
  }
  return "stalled";
}

}  // namespace greycone

#include "swinglab/trace.hpp"

namespace swinglab {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::FaultOn:
      return "FaultOn";
    case EventKind::FaultCleared:
      return "FaultCleared";
    case EventKind::LvrtEntry:
      return "LvrtEntry";
    case EventKind::RecoveryStart:
      return "RecoveryStart";
    case EventKind::RecoveryComplete:
      return "RecoveryComplete";
    case EventKind::Diverged:
      return "Diverged";
  }
  return "?";
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed:
      return "Completed";
    case RunStatus::Diverged:
      return "Diverged";
    case RunStatus::Aborted:
      return "Aborted";
  }
  return "?";
}

}  // namespace swinglab

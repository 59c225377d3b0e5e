#include "radcorr/errors.hpp"

namespace radcorr {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Resonance: return "resonance";
    case ErrorKind::Integrability: return "integrability";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::Internal: return "internal";
    case ErrorKind::Resource: return "resource";
    case ErrorKind::Unimplemented: return "unimplemented";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return 2;
    case ErrorKind::Domain:
    case ErrorKind::Resonance:
    case ErrorKind::Integrability:
    case ErrorKind::Unimplemented: return 3;
    case ErrorKind::Accuracy:
    case ErrorKind::Internal: return 4;
    case ErrorKind::Resource: return 5;
  }
  return 1;
}

std::string Error::line() const {
  std::string out = module_ + ": " + to_string(kind_) + ": " + what();
  for (auto& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

void fail(ErrorKind kind, const std::string& module, const std::string& what) {
  throw Error(kind, module, what);
}

}  // namespace radcorr

#include "livsic/exec.hpp"

#include "livsic/error.hpp"

namespace livsic {

namespace {
Exec g_default = Exec::openmp();
}

Exec default_exec() { return g_default; }
void set_default_exec(Exec exec) { g_default = exec; }

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::not_hyperbolic: return "not_hyperbolic";
    case ErrorKind::reducible: return "reducible";
    case ErrorKind::enumeration_cap: return "enumeration_cap";
    case ErrorKind::poo_failure: return "poo_failure";
    case ErrorKind::grid_mismatch: return "grid_mismatch";
    case ErrorKind::ill_conditioned: return "ill_conditioned";
    case ErrorKind::monotonicity: return "monotonicity";
    case ErrorKind::return_claim: return "return_claim";
    case ErrorKind::sparse_atlas: return "sparse_atlas";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace livsic

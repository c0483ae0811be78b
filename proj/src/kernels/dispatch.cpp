#include <cstdlib>
#include <string>

#include "sbp/kernels.hpp"

namespace sbp::kernels {
namespace {

Backend choose_backend() {
  if (const char* env = std::getenv("SBP_KERNELS")) {
    if (std::string(env) == "scalar") return Backend::scalar;
  }
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

}  // namespace

Backend active_backend() {
  static const Backend backend = choose_backend();
  return backend;
}

const KernelTable& active() {
  static const KernelTable& table =
      active_backend() == Backend::avx2 ? avx2_table() : scalar_table();
  return table;
}

std::string_view backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

}  // namespace sbp::kernels

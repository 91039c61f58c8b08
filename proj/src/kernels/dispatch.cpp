#include <atomic>
#include <cstdlib>
#include <string>

#include "fairmap/errors.hpp"
#include "fairmap/kernels.hpp"

namespace fairmap::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* lookup(Backend b) noexcept {
  switch (b) {
    case Backend::kScalar:
      return &scalar_table();
    case Backend::kAvx2:
      return cpu_has_avx2() ? detail::avx2_table() : nullptr;
    case Backend::kNeon:
      return detail::neon_table();
  }
  return nullptr;
}

const KernelTable* initial_selection() noexcept {
  if (const char* env = std::getenv("FAIRMAP_KERNEL")) {
    const std::string_view want(env);
    for (Backend b : {Backend::kScalar, Backend::kAvx2, Backend::kNeon}) {
      if (want == backend_name(b)) {
        if (const KernelTable* t = lookup(b)) return t;
      }
    }
  }
  for (Backend b : {Backend::kAvx2, Backend::kNeon}) {
    if (const KernelTable* t = lookup(b)) return t;
  }
  return &scalar_table();
}

std::atomic<const KernelTable*>& selection() noexcept {
  static std::atomic<const KernelTable*> current{initial_selection()};
  return current;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::kScalar, Backend::kAvx2, Backend::kNeon}) {
    if (lookup(b) != nullptr) out.push_back(b);
  }
  return out;
}

const KernelTable& table(Backend b) {
  const KernelTable* t = lookup(b);
  if (t == nullptr) {
    throw InvalidArgumentError("kernel backend '" + std::string(backend_name(b)) + "' is not available");
  }
  return *t;
}

const KernelTable& active() noexcept { return *selection().load(std::memory_order_acquire); }

Backend active_backend() noexcept { return active().backend; }

bool set_backend(Backend b) noexcept {
  const KernelTable* t = lookup(b);
  if (t == nullptr) return false;
  selection().store(t, std::memory_order_release);
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double out = 0.0;
  active().row_dots(RowBlock{a.data(), 1, a.size()}, b.data(), &out);
  return out;
}

double squared_norm(std::span<const double> a) noexcept {
  double out = 0.0;
  active().row_sqnorms(RowBlock{a.data(), 1, a.size()}, &out);
  return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double out = 0.0;
  active().row_sqdists(RowBlock{a.data(), 1, a.size()}, b.data(), &out);
  return out;
}

}  // namespace fairmap::kernels

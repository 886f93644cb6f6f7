#include "msort/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace msort {
namespace {

std::mutex g_plan_mutex;
std::map<std::pair<int, bool>, fftw_plan> g_plans;

fftw_plan get_plan(int n, bool inverse) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_pair(n, inverse);
  auto it = g_plans.find(key);
  if (it != g_plans.end()) return it->second;
  // FFTW_UNALIGNED lets the plan execute on any caller buffer.
  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n) * n);
  fftw_plan plan = fftw_plan_dft_2d(n, n, buf, buf,
                                    inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  g_plans.emplace(key, plan);
  return plan;
}

}  // namespace

void fft2_inplace(int n, std::complex<double>* data, bool inverse) {
  fftw_plan plan = get_plan(n, inverse);
  auto* raw = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, raw, raw);
  if (inverse) {
    const double scale = 1.0 / (static_cast<double>(n) * n);
    const size_t total = static_cast<size_t>(n) * n;
    for (size_t i = 0; i < total; ++i) data[i] *= scale;
  }
}

}  // namespace msort

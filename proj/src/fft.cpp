#include "bardina/fft.hpp"

#include <fftw3.h>

#include <cstdlib>
#include <map>
#include <mutex>
#include <stdexcept>

namespace bardina::fft {

namespace {

std::mutex plan_mutex;

int read_thread_cap() {
    const char* env = std::getenv("BARDINA_THREADS");
    if (!env) return 1;
    const long v = std::strtol(env, nullptr, 10);
    return v >= 1 ? static_cast<int>(v) : 1;
}

int init_threads() {
    const int cap = read_thread_cap();
#ifdef BARDINA_FFTW_THREADS
    if (cap > 1) {
        fftw_init_threads();
        fftw_plan_with_nthreads(cap);
        return cap;
    }
#endif
    return 1;
}

// Plans are created once per (n, sign) with FFTW_ESTIMATE so planning is
// deterministic; FFTW_UNALIGNED lets them run on arbitrary caller buffers.
fftw_plan plan_for(int n, int sign) {
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    static const int threads = init_threads();
    (void)threads;
    const auto key = std::make_pair(n, sign);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    fftw_complex* in = fftw_alloc_complex(static_cast<std::size_t>(n) * n * n);
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n) * n * n);
    if (!in || !out) throw std::bad_alloc();
    fftw_plan p = fftw_plan_dft_3d(n, n, n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (!p) throw std::runtime_error("fftw_plan_dft_3d failed");
    cache.emplace(key, p);
    return p;
}

} // namespace

void forward(const std::complex<double>* phys, std::complex<double>* coef, int n) {
    fftw_plan p = plan_for(n, FFTW_FORWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(phys)),
                     reinterpret_cast<fftw_complex*>(coef));
    const std::size_t total = static_cast<std::size_t>(n) * n * n;
    const double scale = 1.0 / static_cast<double>(total);
    for (std::size_t i = 0; i < total; ++i) coef[i] *= scale;
}

void backward(const std::complex<double>* coef, std::complex<double>* phys, int n) {
    fftw_plan p = plan_for(n, FFTW_BACKWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(coef)),
                     reinterpret_cast<fftw_complex*>(phys));
}

int transform_threads() {
#ifdef BARDINA_FFTW_THREADS
    return read_thread_cap();
#else
    return 1;
#endif
}

} // namespace bardina::fft

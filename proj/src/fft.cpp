#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "qpfk/error.hpp"

namespace qpfk::detail {

namespace {

// FFTW plans are created once per shape and reused; the planner is not
// thread-safe, execution with fftw_execute_dft is.
class PlanCache {
  public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int dim, int n, int sign) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(dim, n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        std::size_t total = 1;
        std::vector<int> dims(dim, n);
        for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);
        auto* scratch = fftw_alloc_complex(total);
        if (scratch == nullptr) throw std::bad_alloc{};
        // ESTIMATE keeps the chosen algorithm, and hence the round-off, reproducible.
        fftw_plan plan =
            fftw_plan_dft(dim, dims.data(), scratch, scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        if (plan == nullptr) throw Error(ErrorKind::unsupported_resolution, "FFTW failed to plan transform");
        plans_.emplace(key, plan);
        return plan;
    }

  private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void execute(std::span<std::complex<double>> data, int dim, int n, int sign) {
    fftw_plan plan = cache().get(dim, n, sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

void fft_forward(std::span<std::complex<double>> data, int dim, int n) { execute(data, dim, n, FFTW_FORWARD); }

void fft_backward(std::span<std::complex<double>> data, int dim, int n) { execute(data, dim, n, FFTW_BACKWARD); }

}  // namespace qpfk::detail

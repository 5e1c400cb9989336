#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace loadcast {

/// Run body(i) for i in [0, count) on up to `workers` threads. Work is handed
/// out through a shared counter; the first exception is rethrown on the
/// caller's thread after all workers finished.
inline void parallel_for(std::size_t count, unsigned workers,
                         const std::function<void(std::size_t)>& body) {
	if (count == 0) return;
	workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
	if (workers == 1) {
		for (std::size_t i = 0; i < count; ++i) body(i);
		return;
	}

	std::atomic<std::size_t> next{0};
	std::exception_ptr first_error;
	std::mutex error_mutex;
	auto worker = [&] {
		for (;;) {
			const std::size_t i = next.fetch_add(1);
			if (i >= count) return;
			try {
				body(i);
			} catch (...) {
				std::lock_guard<std::mutex> lock(error_mutex);
				if (!first_error) first_error = std::current_exception();
			}
		}
	};

	std::vector<std::thread> threads;
	threads.reserve(workers);
	for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker);
	for (auto& t : threads) t.join();
	if (first_error) std::rethrow_exception(first_error);
}

} // namespace loadcast

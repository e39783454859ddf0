// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field wideband secure beamfocusing library
// Copyright (C) 2026 nfsec contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef NFSEC_PARALLEL_HPP
#define NFSEC_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace nfsec::detail
{
    inline int worker_count()
    {
        if (const char *env = std::getenv("NFSEC_WORKERS"))
        {
            int n = std::atoi(env);
            if (n >= 1)
                return n;
        }
        unsigned hc = std::thread::hardware_concurrency();
        return hc > 0 ? static_cast<int>(hc) : 1;
    }

    // Runs fn(i) for i in [0, count). Results must be written to per-index slots;
    // the iteration-to-slot mapping keeps output independent of scheduling.
    inline void parallel_for(int count, const std::function<void(int)> &fn)
    {
        int workers = std::min(worker_count(), count);
        if (workers <= 1)
        {
            for (int i = 0; i < count; ++i)
                fn(i);
            return;
        }
        std::atomic<int> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w)
        {
            pool.emplace_back([&] {
                for (;;)
                {
                    int i = next.fetch_add(1);
                    if (i >= count)
                        return;
                    try
                    {
                        fn(i);
                    }
                    catch (...)
                    {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto &t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }
}

#endif

#pragma once

#include <exception>
#include <mutex>

namespace rel_euler {

// Holds the first exception thrown inside an OpenMP region; rethrow() after it.
class ExceptionSlot {
public:
    template <class F>
    void run(F&& f) noexcept {
        try {
            f();
        } catch (...) {
            std::lock_guard<std::mutex> lk(m_);
            if (!e_) e_ = std::current_exception();
        }
    }
    void rethrow() const {
        if (e_) std::rethrow_exception(e_);
    }

private:
    std::mutex m_;
    std::exception_ptr e_;
};

}  // namespace rel_euler

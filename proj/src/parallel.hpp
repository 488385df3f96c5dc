#pragma once

#include <exception>
#include <mutex>

namespace henon::detail {

// Exceptions must not escape an OpenMP region; park the first one and rethrow afterwards.
class ExceptionSink {
 public:
  template <class F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
      std::lock_guard<std::mutex> lk(m_);
      if (!e_) e_ = std::current_exception();
    }
  }
  void rethrow() {
    if (e_) std::rethrow_exception(e_);
  }

 private:
  std::mutex m_;
  std::exception_ptr e_;
};

}  // namespace henon::detail

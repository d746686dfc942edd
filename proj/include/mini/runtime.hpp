#pragma once

#include "mini/cfg.hpp"
#include "mini/interp.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mini {

// Array-backed stack that starts with room for four elements and doubles when
// full. It records every capacity it has had and how many elements were moved
// by reallocations.
template <class T> class GrowStack {
public:
  GrowStack() : data_(4), history_{4} {}

  size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  size_t capacity() const { return data_.size(); }
  size_t copy_work() const { return copy_work_; }
  const std::vector<size_t> &capacity_history() const { return history_; }

  T &operator[](size_t i) { return data_[i]; }
  const T &operator[](size_t i) const { return data_[i]; }
  T &top() { return data_[size_ - 1]; }
  const T &top() const { return data_[size_ - 1]; }

  void push(T v) {
    reserve(size_ + 1);
    data_[size_++] = std::move(v);
  }
  void pop() { data_[--size_] = T(); }

  // Grows with default elements or shrinks, keeping the capacity.
  void resize(size_t n) {
    reserve(n);
    while (size_ > n)
      pop();
    size_ = n;
  }

private:
  std::vector<T> data_;
  size_t size_ = 0;
  size_t copy_work_ = 0;
  std::vector<size_t> history_;

  void reserve(size_t n) {
    if (n <= data_.size())
      return;
    size_t cap = data_.size();
    while (cap < n)
      cap *= 2;
    std::vector<T> bigger(cap);
    for (size_t i = 0; i < size_; ++i)
      bigger[i] = std::move(data_[i]);
    copy_work_ += size_;
    data_ = std::move(bigger);
    history_.push_back(cap);
  }
};

struct RuntimeFault : std::runtime_error {
  enum class Kind { ResumeOnDead, FieldUnset, Arity, UnknownCoroutine };
  Kind kind;
  RuntimeFault(Kind k, const std::string &msg) : std::runtime_error(msg), kind(k) {}
};

// A running coroutine instance. Frames live on four parallel stacks: the
// coroutine index, the program counter, and the base of the frame's slots in
// the value stack. Copying an instance yields an independent snapshot since
// values are immutable.
struct Instance {
  const CompiledProgram *program = nullptr;
  bool live = true;
  bool call = false;
  std::optional<Value> value;
  std::optional<Value> result;
  std::optional<Value> exception;
  GrowStack<int> cstack;
  GrowStack<int> pstack;
  GrowStack<size_t> bstack;
  GrowStack<Value> vstack;
  // Instrumentation.
  size_t max_host_depth = 0; // deepest nesting of the entry point interpreter
  size_t max_frames = 0;
  long steps = 0;
  long fuel = -1; // remaining operations, or negative for no limit
};

Instance start_instance(const CompiledProgram &p, const std::string &coroutine, const std::vector<Value> &args);
// Runs until the next yield or completion; returns whether the instance is
// still live. Throws RuntimeFault{ResumeOnDead} on a finished instance.
bool resume_instance(Instance &in);
Instance snapshot_instance(const Instance &in);
Value read_value(const Instance &in);
Value read_result(const Instance &in);
Value read_exception(const Instance &in);

// Drives an instance to completion and collects what it yields.
RunOutcome run_compiled(const CompiledProgram &p, const std::string &coroutine, const std::vector<Value> &args,
                        long fuel = 1000000);

} // namespace mini

#pragma once

#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>

namespace jigclu {

/// Bounded single-producer/single-consumer queue with blocking push
/// (backpressure) and blocking pop. close() wakes a waiting consumer; pop
/// returns nullopt once closed and drained.
template <class T>
class BoundedQueue {
public:
    explicit BoundedQueue(size_t capacity = 4) : capacity_(capacity) {}

    void push(T item) {
        std::unique_lock lock(mu_);
        cv_space_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
        if (closed_) return; // consumer gave up; drop the item
        items_.push_back(std::move(item));
        cv_items_.notify_one();
    }

    std::optional<T> pop() {
        std::unique_lock lock(mu_);
        cv_items_.wait(lock, [&] { return !items_.empty() || closed_; });
        if (items_.empty()) return std::nullopt;
        T out = std::move(items_.front());
        items_.pop_front();
        cv_space_.notify_one();
        return out;
    }

    void close() {
        std::lock_guard lock(mu_);
        closed_ = true;
        cv_items_.notify_all();
        cv_space_.notify_all();
    }

private:
    size_t capacity_;
    std::deque<T> items_;
    bool closed_ = false;
    std::mutex mu_;
    std::condition_variable cv_items_, cv_space_;
};

} // namespace jigclu

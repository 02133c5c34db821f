#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rlscape/rng.hpp"

namespace rlscape {

struct Transition {
    std::vector<double> s;
    std::vector<double> a;
    double r = 0.0;
    std::vector<double> s2;
    bool terminal = false;  // environment termination, not horizon timeout

    bool operator==(const Transition&) const = default;
};

// Fixed-capacity ring buffer of transitions with cheap, exact rewind.
//
// A Mark freezes the cursor (write position, size, insert count). While a
// mark is armed the buffer logs every slot it overwrites, so rewind() can
// undo appends made after the mark even once the ring has wrapped, restoring
// the buffer to a byte-identical state. release() accepts the appends and
// drops the log. At most one mark may be armed at a time.
class ReplayBuffer {
public:
    struct Mark {
        std::size_t next = 0;
        std::size_t size = 0;
        std::uint64_t insert_count = 0;
    };

    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
        data_.reserve(capacity < 4096 ? capacity : 4096);
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return data_.size() < capacity_ ? data_.size() : capacity_; }
    std::uint64_t insert_count() const { return insert_count_; }

    void push(Transition t) {
        if (data_.size() < capacity_) {
            data_.push_back(std::move(t));
        } else {
            if (armed_) undo_log_.emplace_back(next_, std::move(data_[next_]));
            data_[next_] = std::move(t);
        }
        next_ = (next_ + 1) % capacity_;
        ++insert_count_;
    }

    // Logical indexing: 0 is the oldest stored transition.
    const Transition& at_logical(std::size_t i) const {
        if (i >= size()) throw std::out_of_range("ReplayBuffer: logical index out of range");
        if (data_.size() < capacity_) return data_[i];
        return data_[(next_ + i) % capacity_];
    }

    // Uniform minibatch of logical indices.
    std::vector<std::size_t> sample_indices(std::size_t k, RngStream& rng) const {
        if (size() == 0) throw std::logic_error("ReplayBuffer: sampling from empty buffer");
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) {
            idx[i] = static_cast<std::size_t>(rng.uniform_index(size()));
        }
        return idx;
    }

    Mark mark() {
        if (armed_) throw std::logic_error("ReplayBuffer: mark already armed");
        armed_ = true;
        undo_log_.clear();
        return Mark{next_, data_.size(), insert_count_};
    }

    void rewind(const Mark& m) {
        if (!armed_) throw std::logic_error("ReplayBuffer: rewind without armed mark");
        for (std::size_t i = undo_log_.size(); i-- > 0;) {
            data_[undo_log_[i].first] = std::move(undo_log_[i].second);
        }
        undo_log_.clear();
        data_.resize(m.size);  // drops appends made while below capacity
        next_ = m.next;
        insert_count_ = m.insert_count;
        armed_ = false;
    }

    void release(const Mark&) {
        if (!armed_) throw std::logic_error("ReplayBuffer: release without armed mark");
        undo_log_.clear();
        armed_ = false;
    }

    bool operator==(const ReplayBuffer& other) const {
        return capacity_ == other.capacity_ && next_ == other.next_ &&
               insert_count_ == other.insert_count_ && data_ == other.data_;
    }

    // Raw access for serialization (physical order).
    const std::vector<Transition>& raw() const { return data_; }
    std::size_t write_pos() const { return next_; }
    void restore_raw(std::vector<Transition> data, std::size_t next, std::uint64_t insert_count) {
        if (data.size() > capacity_) throw std::invalid_argument("ReplayBuffer: restore overflow");
        data_ = std::move(data);
        next_ = next;
        insert_count_ = insert_count;
        armed_ = false;
        undo_log_.clear();
    }

private:
    std::size_t capacity_;
    std::vector<Transition> data_;
    std::size_t next_ = 0;
    std::uint64_t insert_count_ = 0;
    bool armed_ = false;
    std::vector<std::pair<std::size_t, Transition>> undo_log_;
};

}  // namespace rlscape

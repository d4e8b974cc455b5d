#pragma once

#include <memory>
#include <mutex>
#include <unordered_map>

namespace icls {

/// Hands out one mutex per key. Entries are never erased; the key spaces used
/// here (learners, units) are bounded by the catalog.
template <typename Key>
class KeyedMutex {
public:
    std::unique_lock<std::mutex> lock(const Key& key) {
        std::shared_ptr<std::mutex> m;
        {
            std::lock_guard guard(table_mutex_);
            auto& slot = table_[key];
            if (!slot) slot = std::make_shared<std::mutex>();
            m = slot;
        }
        return std::unique_lock<std::mutex>(*m);
    }

private:
    std::mutex table_mutex_;
    std::unordered_map<Key, std::shared_ptr<std::mutex>> table_;
};

} // namespace icls

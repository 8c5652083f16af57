#ifndef FEWMT_NET_HPP
#define FEWMT_NET_HPP

#include <chrono>

namespace fewmt {

// Retry contract shared by every remote client: transient failures
// (connection errors, HTTP 5xx) are retried with exponential backoff up to
// max_attempts; definitive refusals (HTTP 4xx) are not.
struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{50};
    double multiplier = 2.0;
};

}  // namespace fewmt

#endif  // FEWMT_NET_HPP

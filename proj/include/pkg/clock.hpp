#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace pkg {

using Timestamp = std::chrono::sys_seconds;

class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
public:
    Timestamp now() const override;
};

/// Clock pinned to a fixed instant; tests advance it explicitly.
class FixedClock final : public Clock {
public:
    explicit FixedClock(Timestamp t) : now_(t) {}
    Timestamp now() const override { return now_; }
    void set(Timestamp t) { now_ = t; }
    void advance(std::chrono::seconds d) { now_ += d; }

private:
    Timestamp now_;
};

/// `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(Timestamp t);
/// Accepts exactly the format produced by format_timestamp.
std::optional<Timestamp> parse_timestamp(std::string_view text);

} // namespace pkg

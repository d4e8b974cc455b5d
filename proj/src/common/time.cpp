#include "icls/time.hpp"

#include <charconv>
#include <cstdio>

namespace icls {

namespace {

bool parse_int(std::string_view s, int& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

} // namespace

Timestamp now_utc() {
    return std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::string format_date(Date d) {
    std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        !parse_int(text.substr(8, 2), d))
        return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

std::string format_rfc3339(Timestamp t) {
    using namespace std::chrono;
    auto day = floor<days>(t);
    auto ms = (t - day).count();
    auto h = ms / 3'600'000;
    auto mi = (ms / 60'000) % 60;
    auto s = (ms / 1000) % 60;
    auto frac = ms % 1000;
    char buf[40];
    if (frac == 0)
        std::snprintf(buf, sizeof buf, "%sT%02lld:%02lld:%02lldZ", format_date(day).c_str(),
                      static_cast<long long>(h), static_cast<long long>(mi), static_cast<long long>(s));
    else
        std::snprintf(buf, sizeof buf, "%sT%02lld:%02lld:%02lld.%03lldZ", format_date(day).c_str(),
                      static_cast<long long>(h), static_cast<long long>(mi), static_cast<long long>(s),
                      static_cast<long long>(frac));
    return buf;
}

std::optional<Timestamp> parse_rfc3339(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SS[.fff]Z ; only the UTC designator is accepted
    if (text.size() < 20 || (text[10] != 'T' && text[10] != 't') || text.back() != 'Z') return std::nullopt;
    auto date = parse_date(text.substr(0, 10));
    if (!date) return std::nullopt;
    auto clock = text.substr(11, text.size() - 12);
    if (clock.size() < 8 || clock[2] != ':' || clock[5] != ':') return std::nullopt;
    int h = 0, mi = 0, s = 0, ms = 0;
    if (!parse_int(clock.substr(0, 2), h) || !parse_int(clock.substr(3, 2), mi) ||
        !parse_int(clock.substr(6, 2), s))
        return std::nullopt;
    if (clock.size() > 8) {
        if (clock[8] != '.' || clock.size() < 10) return std::nullopt;
        auto frac = clock.substr(9);
        std::string padded{frac.substr(0, 3)};
        while (padded.size() < 3) padded.push_back('0');
        if (!parse_int(padded, ms)) return std::nullopt;
        for (char c : frac)
            if (c < '0' || c > '9') return std::nullopt;
    }
    if (h > 23 || mi > 59 || s > 60) return std::nullopt;
    using namespace std::chrono;
    return Timestamp{*date} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
}

} // namespace icls

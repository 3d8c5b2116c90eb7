#include "termstruct/dates.hpp"

#include <cctype>
#include <cstdio>

#include "termstruct/errors.hpp"

namespace termstruct {

namespace {

bool all_digits(std::string_view text) {
    for (char c : text) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return !text.empty();
}

int to_int(std::string_view text) {
    int value = 0;
    for (char c : text) value = value * 10 + (c - '0');
    return value;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
        !all_digits(text.substr(0, 4)) || !all_digits(text.substr(5, 2)) ||
        !all_digits(text.substr(8, 2))) {
        throw ParseError("malformed date '" + std::string(text) + "', expected YYYY-MM-DD");
    }
    Date date = std::chrono::year{to_int(text.substr(0, 4))} /
                std::chrono::month{static_cast<unsigned>(to_int(text.substr(5, 2)))} /
                std::chrono::day{static_cast<unsigned>(to_int(text.substr(8, 2)))};
    if (!date.ok()) {
        throw ParseError("malformed date '" + std::string(text) + "', not a calendar day");
    }
    return date;
}

DeliveryMonth parse_delivery_month(std::string_view text) {
    if (text.size() != 7 || text[4] != '-' || !all_digits(text.substr(0, 4)) ||
        !all_digits(text.substr(5, 2))) {
        throw ParseError("malformed delivery month '" + std::string(text) + "', expected YYYY-MM");
    }
    DeliveryMonth month = std::chrono::year{to_int(text.substr(0, 4))} /
                          std::chrono::month{static_cast<unsigned>(to_int(text.substr(5, 2)))};
    if (!month.ok()) {
        throw ParseError("malformed delivery month '" + std::string(text) + "'");
    }
    return month;
}

std::string format_date(const Date& date) {
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u", int(date.year()),
                  unsigned(date.month()), unsigned(date.day()));
    return buffer;
}

std::string format_delivery_month(const DeliveryMonth& month) {
    char buffer[12];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02u", int(month.year()), unsigned(month.month()));
    return buffer;
}

int days_between(const Date& from, const Date& to) {
    const std::chrono::sys_days a{from};
    const std::chrono::sys_days b{to};
    return static_cast<int>((b - a).count());
}

DeliveryMonth month_of(const Date& date) {
    return date.year() / date.month();
}

bool is_weekend(const Date& date) {
    const std::chrono::weekday day{std::chrono::sys_days{date}};
    return day == std::chrono::Saturday || day == std::chrono::Sunday;
}

Date next_business_day(const Date& date) {
    std::chrono::sys_days day{date};
    do {
        day += std::chrono::days{1};
    } while (is_weekend(Date{day}));
    return Date{day};
}

}  // namespace termstruct

#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace termstruct {

using Date = std::chrono::year_month_day;
using DeliveryMonth = std::chrono::year_month;

// Strict "YYYY-MM-DD"; throws ParseError on anything else (including 2005-13-01).
Date parse_date(std::string_view text);

// Strict "YYYY-MM".
DeliveryMonth parse_delivery_month(std::string_view text);

std::string format_date(const Date& date);
std::string format_delivery_month(const DeliveryMonth& month);

// Calendar days from `from` to `to` (positive when `to` is later).
int days_between(const Date& from, const Date& to);

DeliveryMonth month_of(const Date& date);

bool is_weekend(const Date& date);

// Next business day (Mon-Fri); holidays are not modeled.
Date next_business_day(const Date& date);

}  // namespace termstruct

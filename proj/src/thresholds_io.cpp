// SPDX-License-Identifier: Apache-2.0
#include "effsnr/error.hpp"
#include "effsnr/predict.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

namespace effsnr {

using nlohmann::json;

ThresholdTable read_thresholds(std::istream& in)
{
    json j;
    try {
        j = json::parse(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    } catch (const json::exception& e) {
        throw ParseError(std::nullopt, std::string("malformed threshold table: ") + e.what());
    }
    if (!j.is_object() || !j.contains("thresholds") || !j["thresholds"].is_object())
        throw ParseError(std::nullopt, "threshold table needs a \"thresholds\" object");
    ThresholdTable t;
    try {
        t.receiver_model = j.value("receiver_model", t.receiver_model);
        t.packet_len_bytes = j.value("packet_len_bytes", t.packet_len_bytes);
        t.metric = parse_metric(j.value("metric", std::string(to_string(t.metric))));
    } catch (const json::exception& e) {
        throw ParseError(std::nullopt, std::string("bad threshold metadata: ") + e.what());
    } catch (const ArgumentError& e) {
        throw ParseError(std::nullopt, e.what());
    }
    for (const auto& [key, value] : j["thresholds"].items()) {
        int idx = -1;
        auto res = std::from_chars(key.data(), key.data() + key.size(), idx);
        if (res.ec != std::errc() || res.ptr != key.data() + key.size() || idx < 0 || idx >= kMcsCount)
            throw ParseError(std::nullopt, "bad MCS key '" + key + "' in threshold table");
        if (!value.is_number() || !std::isfinite(value.get<double>()))
            throw ParseError(std::nullopt, "threshold for MCS " + key + " is not a finite number");
        t.thresholds[idx] = value.get<double>();
    }
    return t;
}

ThresholdTable read_thresholds(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open threshold table '" + path.string() + "'");
    return read_thresholds(in);
}

void write_thresholds(const ThresholdTable& t, std::ostream& out)
{
    nlohmann::ordered_json j;
    j["receiver_model"] = t.receiver_model;
    j["packet_len_bytes"] = t.packet_len_bytes;
    j["metric"] = std::string(to_string(t.metric));
    nlohmann::ordered_json th = nlohmann::ordered_json::object();
    for (const auto& [m, v] : t.thresholds)
        th[std::to_string(m)] = v;
    j["thresholds"] = th;
    out << j.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("threshold table write failed");
}

void write_thresholds(const ThresholdTable& t, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_thresholds(t, out);
}

} // namespace effsnr

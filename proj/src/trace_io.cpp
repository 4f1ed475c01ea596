// SPDX-License-Identifier: Apache-2.0
#include "effsnr/error.hpp"
#include "effsnr/trace.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace effsnr {

using nlohmann::json;

namespace {

constexpr std::string_view kFormat = "effsnr-trace/1";

void put_float(std::string& out, float v)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    out.append(buf, res.ptr);
}

void put_double(std::string& out, double v)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

void put_int(std::string& out, std::int64_t v)
{
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

std::string format_header(const TraceHeader& h, TraceEncoding enc)
{
    std::string s = "{\"format\":\"";
    s += kFormat;
    s += "\",\"n_rx\":";
    put_int(s, h.n_rx);
    s += ",\"n_tx\":";
    put_int(s, h.n_tx);
    s += ",\"n_sub\":";
    put_int(s, h.n_sub);
    s += ",\"interval_us\":";
    put_int(s, h.interval_us);
    s += ",\"encoding\":\"";
    s += to_string(enc);
    s += "\"}";
    return s;
}

void format_record(std::string& s, const CsiMeasurement& m, TraceEncoding enc)
{
    s += "{\"t_us\":";
    put_int(s, m.timestamp_us);
    s += ",\"rssi_dbm\":[";
    for (std::size_t i = 0; i < m.rssi_dbm.size(); ++i) {
        if (i)
            s += ',';
        put_double(s, m.rssi_dbm[i]);
    }
    s += "],\"noise_dbm\":";
    put_double(s, m.noise_dbm);
    s += ",\"agc_db\":";
    put_double(s, m.agc_db);

    QuantizedGains q;
    if (enc == TraceEncoding::q8) {
        q = quantize_codes(m, 8);
        s += ",\"scale\":";
        put_float(s, q.step);
    }
    s += ",\"csi\":[";
    for (int sub = 0; sub < m.n_sub; ++sub) {
        s += sub ? ",[" : "[";
        for (int r = 0; r < m.n_rx; ++r) {
            s += r ? ",[" : "[";
            for (int t = 0; t < m.n_tx; ++t) {
                s += t ? ",[" : "[";
                const std::size_t idx = m.index(sub, r, t);
                if (enc == TraceEncoding::q8) {
                    put_int(s, q.codes[2 * idx]);
                    s += ',';
                    put_int(s, q.codes[2 * idx + 1]);
                } else {
                    put_float(s, m.gains[idx].real());
                    s += ',';
                    put_float(s, m.gains[idx].imag());
                }
                s += ']';
            }
            s += ']';
        }
        s += ']';
    }
    s += "]}";
}

template <class T>
T field(const json& obj, const char* name, std::optional<std::size_t> rec)
{
    auto it = obj.find(name);
    if (it == obj.end())
        throw ParseError(rec, std::string("missing field '") + name + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ParseError(rec, std::string("bad value for '") + name + "'");
    }
}

TraceHeader parse_header(const std::string& line)
{
    json h;
    try {
        h = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(std::nullopt, std::string("malformed header: ") + e.what());
    }
    if (!h.is_object())
        throw ParseError(std::nullopt, "header is not an object");
    if (field<std::string>(h, "format", std::nullopt) != kFormat)
        throw ParseError(std::nullopt, "unsupported trace format");
    TraceHeader hdr;
    hdr.n_rx = field<int>(h, "n_rx", std::nullopt);
    hdr.n_tx = field<int>(h, "n_tx", std::nullopt);
    hdr.n_sub = field<int>(h, "n_sub", std::nullopt);
    hdr.interval_us = field<std::int64_t>(h, "interval_us", std::nullopt);
    try {
        hdr.encoding = parse_encoding(field<std::string>(h, "encoding", std::nullopt));
    } catch (const ArgumentError& e) {
        throw ParseError(std::nullopt, e.what());
    }
    if (hdr.n_rx < 1 || hdr.n_rx > kMaxAntennas || hdr.n_tx < 1 || hdr.n_tx > kMaxAntennas)
        throw ParseError(std::nullopt, "antenna counts out of range");
    if (hdr.n_sub != 56 && hdr.n_sub != 114)
        throw ParseError(std::nullopt, "n_sub must be 56 or 114");
    if (hdr.interval_us <= 0)
        throw ParseError(std::nullopt, "interval_us must be positive");
    return hdr;
}

CsiMeasurement parse_record(const std::string& line, const TraceHeader& hdr, std::size_t rec)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception&) {
        throw ParseError(rec, "malformed or truncated record");
    }
    if (!j.is_object())
        throw ParseError(rec, "record is not an object");

    CsiMeasurement m(hdr.n_rx, hdr.n_tx, hdr.n_sub);
    m.timestamp_us = field<std::int64_t>(j, "t_us", rec);
    m.rssi_dbm = field<std::vector<double>>(j, "rssi_dbm", rec);
    m.noise_dbm = field<double>(j, "noise_dbm", rec);
    m.agc_db = field<double>(j, "agc_db", rec);
    if (m.rssi_dbm.size() != static_cast<std::size_t>(hdr.n_rx))
        throw ParseError(rec, "rssi_dbm length does not match n_rx");

    const bool q8 = hdr.encoding == TraceEncoding::q8;
    QuantizedGains q;
    if (q8) {
        q.step = static_cast<float>(field<double>(j, "scale", rec));
        q.codes.resize(m.gains.size() * 2);
    }

    auto it = j.find("csi");
    if (it == j.end() || !it->is_array() || it->size() != static_cast<std::size_t>(hdr.n_sub))
        throw ParseError(rec, "csi must hold n_sub matrices");
    for (int sub = 0; sub < hdr.n_sub; ++sub) {
        const json& mat = (*it)[sub];
        if (!mat.is_array() || mat.size() != static_cast<std::size_t>(hdr.n_rx))
            throw ParseError(rec, "csi matrix " + std::to_string(sub) + " has wrong row count");
        for (int r = 0; r < hdr.n_rx; ++r) {
            const json& row = mat[r];
            if (!row.is_array() || row.size() != static_cast<std::size_t>(hdr.n_tx))
                throw ParseError(rec, "csi matrix " + std::to_string(sub) + " has wrong column count");
            for (int t = 0; t < hdr.n_tx; ++t) {
                const json& c = row[t];
                if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
                    throw ParseError(rec, "csi entry must be [re, im]");
                const std::size_t idx = m.index(sub, r, t);
                if (q8) {
                    if (!c[0].is_number_integer() || !c[1].is_number_integer())
                        throw ParseError(rec, "q8 csi entries must be integers");
                    q.codes[2 * idx] = c[0].get<std::int32_t>();
                    q.codes[2 * idx + 1] = c[1].get<std::int32_t>();
                } else {
                    m.gains[idx] = Gain(static_cast<float>(c[0].get<double>()),
                                        static_cast<float>(c[1].get<double>()));
                }
            }
        }
    }
    if (q8)
        apply_codes(m, q);
    try {
        validate(m);
    } catch (const ArgumentError& e) {
        throw ParseError(rec, e.what());
    }
    return m;
}

} // namespace

std::string_view to_string(TraceEncoding e)
{
    return e == TraceEncoding::q8 ? "q8" : "f32";
}

TraceEncoding parse_encoding(std::string_view name)
{
    if (name == "f32")
        return TraceEncoding::f32;
    if (name == "q8")
        return TraceEncoding::q8;
    throw ArgumentError("unknown trace encoding '" + std::string(name) + "'");
}

void validate(const ChannelTrace& trace)
{
    const TraceHeader& h = trace.header;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const CsiMeasurement& m = trace.records[i];
        if (m.n_rx != h.n_rx || m.n_tx != h.n_tx || m.n_sub != h.n_sub)
            throw ArgumentError("record " + std::to_string(i) + " dimensions differ from header");
        validate(m);
        if (i > 0 && m.timestamp_us <= trace.records[i - 1].timestamp_us)
            throw ArgumentError("record " + std::to_string(i) + " timestamp not increasing");
    }
}

ChannelTrace read_trace(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(std::nullopt, "empty trace file");
    ChannelTrace trace;
    trace.header = parse_header(line);
    std::size_t rec = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        CsiMeasurement m = parse_record(line, trace.header, rec);
        if (!trace.records.empty() && m.timestamp_us <= trace.records.back().timestamp_us)
            throw ParseError(rec, "timestamp not strictly increasing");
        trace.records.push_back(std::move(m));
        ++rec;
    }
    return trace;
}

ChannelTrace read_trace(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open trace '" + path.string() + "'");
    return read_trace(in);
}

void write_trace(const ChannelTrace& trace, std::ostream& out, TraceEncoding encoding)
{
    validate(trace);
    out << format_header(trace.header, encoding) << '\n';
    std::string line;
    for (const CsiMeasurement& m : trace.records) {
        line.clear();
        format_record(line, m, encoding);
        line += '\n';
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
    }
    if (!out)
        throw std::runtime_error("trace write failed");
}

void write_trace(const ChannelTrace& trace, const std::filesystem::path& path, TraceEncoding encoding)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_trace(trace, out, encoding);
}

} // namespace effsnr

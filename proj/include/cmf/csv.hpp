#pragma once

// CSV plumbing shared by the CLI and the acceptance suite: fixed numeric
// formatting so identical results serialize to identical bytes, and
// atomic file writes so a failed run never leaves a partial file.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmf::csv {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 6 significant digits, the format for probabilities and rates.
inline std::string sig6(double v) {
    char b[48];
    std::snprintf(b, sizeof b, "%.6g", v);
    return b;
}

/// 6 decimal places, the format for table values.
inline std::string fixed6(double v) {
    char b[48];
    std::snprintf(b, sizeof b, "%.6f", v);
    return b;
}

struct KV {
    std::string key;
    std::string value;
};

/// "# key=value" lines echoing the resolved configuration.
inline std::string comment_header(const std::vector<KV>& kvs) {
    std::string out;
    for (const auto& kv : kvs) {
        out += "# ";
        out += kv.key;
        out += '=';
        out += kv.value;
        out += '\n';
    }
    return out;
}

/// Write via a temp file and rename, removing the temp on any failure.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp.string());
        os << content;
        os.flush();
        if (!os) {
            os.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ec2;
        std::filesystem::remove(tmp, ec2);
        throw IoError("rename to " + path.string() + " failed: " + ec.message());
    }
}

}  // namespace cmf::csv

#include "cbjj/manifest.hpp"

#include <openssl/evp.h>

#include <memory>

#include "cbjj/csv.hpp"
#include "cbjj/error.hpp"

namespace cbjj {

std::string code_version()
{
    return CBJJ_VERSION;
}

std::string sha256_hex(std::string_view bytes)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        raise(ErrorKind::Computation, "SHA-256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

nlohmann::json to_json(const RunManifest& m)
{
    nlohmann::json j;
    j["command"] = m.command;
    j["junction"] = m.junction;
    j["code_version"] = code_version();
    j["seed"] = m.config.seed;
    j["calibration_factor"] = m.config.scenario.noise.calibration_factor;
    j["config"] = config_entries(m.config);
    j["config_text"] = serialize_config(m.config);
    j["settings"] = m.settings;
    j["results"] = m.results;
    j["notes"] = m.notes;
    j["wall_clock_s"] = m.wall_clock_s;
    j["checksums"] = m.checksums;
    return j;
}

void write_run(const std::filesystem::path& dir, const std::map<std::string, std::string>& files,
               RunManifest manifest)
{
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : files) {
        write_text(dir / name, content);
        manifest.checksums[name] = sha256_hex(content);
    }
    write_text(dir / "manifest.json", to_json(manifest).dump(2) + "\n");
}

}  // namespace cbjj

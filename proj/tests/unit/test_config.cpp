#include "doctest.h"

#include "mcsc/config.hpp"
#include "mcsc/error.hpp"

#include <fstream>
#include <functional>

using namespace mcsc;
using namespace mcsc::harness;
using nlohmann::json;

namespace {

json smallDoc()
{
    std::ifstream in(MCSC_TEST_DATA_DIR "/small_mcsc.json");
    REQUIRE(in.good());
    return json::parse(in);
}

// Applies the edit and returns the field named by the resulting ValidationError.
std::string rejectedField(const std::function<void(json&)>& edit)
{
    json doc = smallDoc();
    edit(doc);
    try {
        parseConfig(doc);
    } catch (const ValidationError& e) {
        return e.field();
    }
    return "<accepted>";
}

} // namespace

TEST_CASE("parse a scenario document")
{
    const ScenarioConfig c = parseConfig(smallDoc());
    CHECK(c.name == "small");
    CHECK(c.plan.channelCount == 125);
    CHECK(c.totalSlots == 3000);
    CHECK(c.seedRotationSlots == 1024);
    CHECK(c.latency.propagationMs == 5);
    CHECK(c.latency.dataRateKbps == 250);
    CHECK(c.interference.perPacketLossProb == doctest::Approx(0.02));
    REQUIRE(c.jammer.has_value());
    CHECK((c.jammer->mode == medium::JammerMode::Random));
    CHECK(c.jammer->channelsPerSlot == 5);
    REQUIRE(c.eavesdropper.has_value());
    CHECK(c.eavesdropper->monitoredChannels == std::vector<hopping::ChannelIndex>{0, 1});
    REQUIRE(c.replayer.has_value());
    CHECK((c.replayer->policy == medium::ReplayChannelPolicy::Random));
    CHECK(c.nodes.size() == 2);
    CHECK(c.master().address == 1);
    CHECK((c.strategy() == node::Strategy::Mcsc));
    CHECK(c.payloadKey == crypto::AesKey::fromHex("2b7e151628aed2a6abf7158809cf4f3c"));
    CHECK(c.networkParams().masterDriftRate == doctest::Approx(1e-5));
    CHECK(c.networkParams().tSyncMs() == doctest::Approx(1000));
}

TEST_CASE("document round trip")
{
    const ScenarioConfig c = parseConfig(smallDoc());
    CHECK(parseConfig(json::parse(toJson(c).dump())) == c);
}

TEST_CASE("validation errors name the field")
{
    CHECK(rejectedField([](json& d) { d.erase("name"); }) == "name");
    CHECK(rejectedField([](json& d) { d["total_slots"] = 0; }) == "total_slots");
    CHECK(rejectedField([](json& d) { d["total_slots"] = -5; }) == "total_slots");
    CHECK(rejectedField([](json& d) { d["slot_ms"] = "ten"; }) == "slot_ms");
    CHECK(rejectedField([](json& d) { d["seed_rotation_slots"] = 70000; }) == "seed_rotation_slots");
    CHECK(rejectedField([](json& d) { d["surprise"] = 1; }) == "surprise");
    CHECK(rejectedField([](json& d) { d["channel_plan"]["channel_count"] = 300; }) == "channel_plan.channel_count");
    CHECK(rejectedField([](json& d) { d["latency"]["data_rate_kbps"] = 500; }) == "latency.data_rate_kbps");
    CHECK(rejectedField([](json& d) { d["latency"]["propagation_ms"] = 10; }) == "latency.propagation_ms");
    CHECK(rejectedField([](json& d) { d["interference"]["per_packet_loss_prob"] = 1.5; }) ==
          "interference.per_packet_loss_prob");
    CHECK(rejectedField([](json& d) { d["interference"]["narrowband"] = json::array({{{"channel", 200}, {"loss_prob", 0.1}}}); }) ==
          "interference.narrowband[0].channel");
    CHECK(rejectedField([](json& d) { d["jammer"]["mode"] = "FIXED"; }) == "jammer.target_channel");
    CHECK(rejectedField([](json& d) { d["jammer"]["mode"] = "LOUD"; }) == "jammer.mode");
    CHECK(rejectedField([](json& d) { d["eavesdropper"]["channels"] = {3, 3}; }) == "eavesdropper.channels[1]");
    CHECK(rejectedField([](json& d) { d.erase("eavesdropper"); }) == "replayer");
    CHECK(rejectedField([](json& d) { d["keys"]["payload_key"] = "abc"; }) == "keys.payload_key");
    CHECK(rejectedField([](json& d) { d["keys"].erase("master_key"); }) == "keys.master_key");
    CHECK(rejectedField([](json& d) {
              d["nodes"][1]["role"] = "MASTER";
              d["nodes"][1].erase("clock_offset_ms");
          }) == "nodes");
    CHECK(rejectedField([](json& d) { d["nodes"][0]["role"] = "MEMBER"; }) == "nodes");
    CHECK(rejectedField([](json& d) { d["nodes"][1]["role"] = "BOSS"; }) == "nodes[1].role");
    CHECK(rejectedField([](json& d) { d["nodes"] = json::array(); }) == "nodes");
    CHECK(rejectedField([](json& d) { d["nodes"][1]["address"] = 1; }) == "nodes[1].address");
    CHECK(rejectedField([](json& d) { d["nodes"][1]["address"] = 70000; }) == "nodes[1].address");
    CHECK(rejectedField([](json& d) { d["nodes"][1]["address"] = 65535; }) == "nodes[1].address");
    CHECK(rejectedField([](json& d) { d["nodes"][1]["strategy"] = "FHSS_BASELINE"; }) == "nodes[1].strategy");
    CHECK(rejectedField([](json& d) { d["nodes"][1]["fixed_channel"] = 3; }) == "nodes[1].fixed_channel");
    CHECK(rejectedField([](json& d) { d["nodes"][1]["traffic"] = 1.5; }) == "nodes[1].traffic");
    CHECK(rejectedField([](json& d) { d["nodes"][1]["drift_rate"] = -1.0; }) == "nodes[1].drift_rate");
    CHECK(rejectedField([](json& d) { d["nodes"][0]["clock_offset_ms"] = 1.0; }) == "nodes[0].clock_offset_ms");
    CHECK(rejectedField([](json& d) {
              for (auto& n : d["nodes"])
                  n["strategy"] = "SINGLE_CHANNEL_AES";
          }) == "nodes[0].fixed_channel");
    CHECK(rejectedField([](json& d) {
              for (auto& n : d["nodes"]) {
                  n["strategy"] = "FHSS_BASELINE";
                  n["fhss_period"] = 0;
              }
          }) == "nodes[0].fhss_period");
    CHECK(rejectedField([](json&) {}) == "<accepted>");
}

TEST_CASE("load errors")
{
    CHECK_THROWS_AS(loadConfig("/nonexistent/file.json"), InvalidConfig);
    CHECK_THROWS_AS(resolveConfigPath("no_such_preset"), InvalidConfig);
}

TEST_CASE("shipped presets")
{
    const std::vector<std::string> expected{"dynamic_channel_hopping", "high_interference", "low_interference",
                                            "medium_interference",     "no_channel_hopping", "with_jamming"};
    CHECK(listPresets() == expected);
    for (const auto& name : expected) {
        CAPTURE(name);
        const ScenarioConfig c = loadConfig(resolveConfigPath(name));
        CHECK(c.name == name);
        CHECK(resolveConfigPath(name + ".json") == resolveConfigPath(name));
    }
    CHECK((loadConfig(resolveConfigPath("no_channel_hopping")).strategy() == node::Strategy::SingleChannelAes));
    CHECK(loadConfig(resolveConfigPath("with_jamming")).jammer.has_value());
}

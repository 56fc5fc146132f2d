#include "mcsc/harness.hpp"

#include "mcsc/error.hpp"

#include <algorithm>
#include <map>

namespace mcsc::harness {

namespace {

// Stream identifiers under the scenario seed. Nodes use kNodeStreamBase + address.
constexpr std::uint64_t kMediumStream = 1;
constexpr std::uint64_t kJammerStream = 2;
constexpr std::uint64_t kReplayStream = 3;
constexpr std::uint64_t kNodeStreamBase = 0x10000;

const ScenarioConfig& validated(const ScenarioConfig& config)
{
    config.validate();
    return config;
}

} // namespace

Simulator::Simulator(const ScenarioConfig& config)
    : config_(validated(config)),
      mediumRng_(Rng(config.rngSeed).split(kMediumStream)),
      replayRng_(Rng(config.rngSeed).split(kReplayStream))
{
    const Rng root(config_.rngSeed);
    const node::NetworkParams params = config_.networkParams();

    std::vector<node::NodeConfig> ordered = config_.nodes;
    std::sort(ordered.begin(), ordered.end(),
              [](const node::NodeConfig& a, const node::NodeConfig& b) { return a.address < b.address; });
    nodes_.reserve(ordered.size());
    for (const auto& nc : ordered)
        nodes_.emplace_back(nc, params, root.split(kNodeStreamBase + nc.address));

    if (config_.jammer)
        jammer_ = std::make_unique<medium::Jammer>(*config_.jammer, config_.plan, root.split(kJammerStream));
    if (config_.eavesdropper)
        eavesdropper_ = std::make_unique<medium::Eavesdropper>(*config_.eavesdropper, config_.plan);

    log_.header.scenario = config_.name;
    log_.header.strategy = config_.strategy();
    log_.header.totalSlots = config_.totalSlots;
    log_.header.slotMs = config_.slotMs;
    log_.header.propagationMs = config_.latency.propagationMs;
    log_.header.processingMs = config_.latency.processingMs;
    log_.header.dataRateKbps = config_.latency.dataRateKbps;
    log_.header.rngSeed = config_.rngSeed;
    log_.header.jammer = config_.jammer.has_value();
    log_.header.eavesdropper = config_.eavesdropper.has_value();
    log_.header.replayer = config_.replayer.has_value();

    for (auto& n : nodes_) {
        auto txs = n.start(0);
        pending_.insert(pending_.end(), txs.begin(), txs.end());
    }
}

void Simulator::step()
{
    if (done())
        throw RangeError("simulation already ran all " + std::to_string(config_.totalSlots) + " slots");

    std::vector<medium::Transmission> txs;
    txs.swap(pending_);

    if (config_.replayer && eavesdropper_ && replayRng_.bernoulli(config_.replayer->injectProb) &&
        !eavesdropper_->log().empty()) {
        medium::Transmission t = medium::replayInject(eavesdropper_->log(), config_.plan, slot_,
                                                      config_.replayer->policy, config_.replayer->address, replayRng_);
        t.injected = true;
        txs.push_back(t);
    }

    std::vector<medium::Listener> listeners;
    for (const auto& n : nodes_)
        if (!n.transmitting())
            listeners.push_back({n.config().address, n.tunedChannel()});

    medium::SlotResult resolved = medium::resolveSlot(slot_, txs, listeners, config_.interference, config_.plan,
                                                      jammer_.get(), eavesdropper_.get(), mediumRng_);

    const std::size_t first = log_.transmissions.size();
    for (const auto& ev : resolved.events)
        log_.transmissions.push_back(TxRecord{ev, 0, 0});

    static const std::vector<medium::Delivery> kEmpty;
    for (auto& n : nodes_) {
        const auto it = resolved.inboxes.find(n.config().address);
        const auto& inbox = it == resolved.inboxes.end() ? kEmpty : it->second;
        node::TickResult r = n.tick(slot_, inbox);
        for (const auto& rec : r.receptions) {
            TxRecord& tr = log_.transmissions.at(first + rec.txIndex);
            if (rec.result == node::ReceptionResult::Accepted)
                ++tr.accepted;
            else if (rec.result == node::ReceptionResult::ReplayRejected)
                ++tr.replayRejected;
        }
        for (std::uint32_t i = 0; i < r.queueDrops; ++i)
            log_.drops.push_back(DropRecord{slot_ + 1, n.config().address});
        pending_.insert(pending_.end(), r.transmissions.begin(), r.transmissions.end());
    }
    ++slot_;
}

void Simulator::run()
{
    while (!done())
        step();
}

EventLog Simulator::log() const
{
    EventLog out = log_;
    for (const auto& n : nodes_)
        out.energy.push_back(EnergyRecord{n.config().address, n.counters().energyMj});
    return out;
}

RunResult runScenario(const ScenarioConfig& config)
{
    Simulator sim(config);
    sim.run();
    RunResult result;
    result.log = sim.log();
    checkConservation(result.log);
    result.metrics = summarize(result.log);
    return result;
}

void checkConservation(const EventLog& log)
{
    std::map<std::uint64_t, std::uint64_t> perSlot;
    std::map<std::uint64_t, std::uint64_t> outcomesPerSlot;
    std::uint64_t lastSlot = 0;
    for (const auto& r : log.transmissions) {
        const auto& ev = r.event;
        if (ev.slot < lastSlot)
            throw ConsistencyError("transmission records out of slot order");
        lastSlot = ev.slot;
        if (ev.slot >= log.header.totalSlots)
            throw ConsistencyError("record for slot beyond the run");
        if (ev.enqueueSlot > ev.slot)
            throw ConsistencyError("frame sent before it was queued");
        if (ev.injected && ev.kind != medium::TxKind::Data)
            throw ConsistencyError("injected beacon");
        const bool delivered =
            ev.outcome == medium::Outcome::Delivered || ev.outcome == medium::Outcome::CorruptDelivered;
        if (!delivered && (ev.receivers != 0 || r.accepted != 0 || r.replayRejected != 0))
            throw ConsistencyError("lost frame reached a receiver");
        if (r.accepted + r.replayRejected > ev.receivers)
            throw ConsistencyError("more receptions than receivers");
        ++perSlot[ev.slot];
        switch (ev.outcome) {
        case medium::Outcome::Delivered:
        case medium::Outcome::CorruptDelivered:
        case medium::Outcome::Collided:
        case medium::Outcome::Jammed:
        case medium::Outcome::InterferenceLost:
            ++outcomesPerSlot[ev.slot];
            break;
        }
    }
    if (perSlot != outcomesPerSlot)
        throw ConsistencyError("outcome counts do not add up to transmissions");
}

} // namespace mcsc::harness

//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs without a browser console; the HTTP API stands in for it.

mod common;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use beacon_nav::bridge::{
    encode_frame, encode_pose_msg, goal_queue, Endpoint, EndpointConfig, Frame as WireFrame, FrameCodec, InboundSink,
    TOPIC_GOAL_POSE,
};
use beacon_nav::server::{self, HitBody};
use beacon_nav::store::{BeaconRecord, Database, StoreError};
use beacon_nav_core::beacon::*;
use beacon_nav_core::evalkit::*;
use beacon_nav_core::geometry::*;
use beacon_nav_core::navsim::*;
use futures::{SinkExt, StreamExt};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tokio::io::{AsyncReadExt, AsyncWriteExt};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("geometry", geometry),
        ("state-machine", state_machine),
        ("persistence", persistence),
        ("bridge", bridge),
        ("navsim", navsim),
        ("statistics", statistics),
        ("report-fixtures", report_fixtures),
        ("end-to-end", end_to_end),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} ({secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} ({secs:.2}s)");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn random_unit_quat(rng: &mut StdRng) -> Quat {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        if let Ok(q) = Quat::normalize(v[0], v[1], v[2], v[3]) {
            return q;
        }
    }
}

fn random_pose(rng: &mut StdRng, frame: Frame) -> Pose {
    let p = Vec3::new(rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0));
    Pose::new(p, random_unit_quat(rng), frame)
}

type M3 = [[f64; 3]; 3];

fn mat_dist(a: &M3, b: &M3) -> f64 {
    (0..9).map(|k| (a[k / 3][k % 3] - b[k / 3][k % 3]).powi(2)).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------- geometry

fn geometry() -> Outcome {
    const N: usize = 10_000;
    // viewer = P · robot
    const P: M3 = [[0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
    let conj = |r: &M3| {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (0..3).map(|k| (0..3).map(|l| P[i][k] * r[k][l] * P[j][l]).sum::<f64>()).sum();
            }
        }
        out
    };
    let mut rng = StdRng::seed_from_u64(0x6e0);
    let poses: Vec<Pose> =
        (0..N).map(|i| random_pose(&mut rng, if i % 2 == 0 { Frame::RobotMap } else { Frame::Viewer })).collect();

    let start = Instant::now();
    let mut worst_pos = 0.0f64;
    let mut worst_rot = 0.0f64;
    for pose in &poses {
        let back = match pose.frame {
            Frame::RobotMap => pose.to_viewer().and_then(|v| v.to_robot()),
            Frame::Viewer => pose.to_robot().and_then(|v| v.to_viewer()),
        }
        .map_err(|e| e.to_string())?;
        worst_pos = worst_pos.max(back.position.sub(&pose.position).norm());
        worst_rot =
            worst_rot.max(mat_dist(&back.orientation.to_rotation_matrix(), &pose.orientation.to_rotation_matrix()));
    }
    let elapsed = start.elapsed();
    ensure!(worst_pos <= 1e-12, "position round trip error {worst_pos:e}");
    ensure!(worst_rot <= 1e-10, "rotation round trip distance {worst_rot:e}");
    ensure!(elapsed < Duration::from_secs(1), "round trips took {elapsed:?}");

    let mut worst_conj = 0.0f64;
    for pose in poses.iter().filter(|p| p.frame == Frame::RobotMap) {
        let v = pose.to_viewer().map_err(|e| e.to_string())?;
        let rr = pose.orientation.to_rotation_matrix();
        worst_conj = worst_conj.max(mat_dist(&v.orientation.to_rotation_matrix(), &conj(&rr)));
        let p = pose.position;
        let expect = Vec3::new(-p.y, p.z, p.x);
        worst_pos = worst_pos.max(v.position.sub(&expect).norm());
    }
    ensure!(worst_conj <= 1e-10, "conjugation oracle distance {worst_conj:e}");
    ensure!(worst_pos <= 1e-12, "axis mapping error {worst_pos:e}");
    Ok(format!(
        "{N} round trips, max position error {worst_pos:.1e}, max rotation distance {worst_rot:.1e}, conjugation {worst_conj:.1e}, {:.0} ms",
        elapsed.as_secs_f64() * 1e3
    ))
}

// ----------------------------------------------------------- state machine

#[derive(Debug, Clone, Copy, PartialEq)]
enum PhaseKind {
    Idle,
    Location,
    Direction,
}

#[derive(Debug, PartialEq)]
enum Expect {
    NoOp,
    Created,
    Follow,
    ToDirection,
    Face,
    Commit,
    Grab,
    Dispatch,
    Remove,
}

/// Transition table for the Add, Move, Select and Delete flows.
fn transition(mode: Mode, phase: PhaseKind, kind: PointerKind, on_beacon: bool) -> Expect {
    use Mode::*;
    use PhaseKind::*;
    use PointerKind::*;
    match (mode, phase, kind, on_beacon) {
        (Add, Idle, Down, false) => Expect::Created,
        (Add | Move, Location, Drag, _) => Expect::Follow,
        (Add | Move, Location, Up, _) => Expect::ToDirection,
        (Add | Move, Direction, Drag, _) => Expect::Face,
        (Add | Move, Direction, Click, _) => Expect::Commit,
        (Move, Idle, Down, true) => Expect::Grab,
        (Select, Idle, Click, true) => Expect::Dispatch,
        (Delete, Idle, Click, true) => Expect::Remove,
        _ => Expect::NoOp,
    }
}

fn state_machine() -> Outcome {
    let b = Beacon { id: BeaconId::from_u128(0xb), pose: Pose::planar(1.0, 0.0, 0.3), footprint: Footprint::default() };
    let target = Vec2::new(2.0, 1.0);
    let mut cells = 0;
    for mode in Mode::ALL {
        for phase in [PhaseKind::Idle, PhaseKind::Location, PhaseKind::Direction] {
            for kind in PointerKind::ALL {
                for on_beacon in [false, true] {
                    cells += 1;
                    let prior = (mode == Mode::Move).then_some(b.pose);
                    let p = match phase {
                        PhaseKind::Idle => Phase::Idle,
                        PhaseKind::Location => Phase::LocationSetting { id: b.id, prior },
                        PhaseKind::Direction => Phase::DirectionSetting { id: b.id, prior },
                    };
                    let Ok(mut s) = Session::from_parts(mode, p, [b], AnchorPose::MAP_ORIGIN, Footprint::default())
                    else {
                        // placement phases cannot exist with the console off
                        ensure!(mode == Mode::Off && phase != PhaseKind::Idle, "cannot build {mode:?}/{phase:?}");
                        continue;
                    };
                    let before = s.clone();
                    let hit = if on_beacon { Hit::Beacon(b.id) } else { Hit::Floor };
                    let fx = s
                        .handle_pointer(&PointerEvent::new(kind, target.x, target.y, hit), &mut SequentialIds::new(1))
                        .map_err(|e| e.to_string())?;
                    let cell = format!("{mode:?}/{phase:?}/{kind:?}/beacon={on_beacon}");
                    let ok = match transition(mode, phase, kind, on_beacon) {
                        Expect::NoOp => fx.is_empty() && s == before,
                        Expect::Created => {
                            matches!(fx[..], [Effect::BeaconCreated(nb)] if nb.pose == Pose::planar(target.x, target.y, 0.0)
                                && s.phase() == Phase::LocationSetting { id: nb.id, prior: None })
                        }
                        Expect::Follow => {
                            let moved = Pose { position: Vec3::new(target.x, target.y, 0.0), ..b.pose };
                            fx == vec![Effect::BeaconTransientPose(b.id, moved)] && s.phase() == before.phase()
                        }
                        Expect::ToDirection => {
                            fx.is_empty() && s.phase() == Phase::DirectionSetting { id: b.id, prior }
                        }
                        Expect::Face => {
                            let yaw = (target.y - 0.0f64).atan2(target.x - 1.0);
                            fx == vec![Effect::BeaconTransientPose(b.id, Pose::planar(1.0, 0.0, yaw))]
                        }
                        Expect::Commit => fx == vec![Effect::BeaconCommitted(b)] && s.phase() == Phase::Idle,
                        Expect::Grab => {
                            fx == vec![Effect::Highlight(b.id, true)]
                                && s.phase() == Phase::LocationSetting { id: b.id, prior: Some(b.pose) }
                        }
                        Expect::Dispatch => {
                            matches!(fx[..], [Effect::GoalDispatched(id, g)] if id == b.id
                                && g.position == b.pose.position && (g.yaw().unwrap() - 0.3).abs() < 1e-12)
                                && s == before
                        }
                        Expect::Remove => fx == vec![Effect::BeaconDeleted(b.id)] && s.beacons().is_empty(),
                    };
                    ensure!(ok, "cell {cell} produced {fx:?}");
                }
            }
        }
    }

    const SEQUENCES: usize = 1000;
    let mut rng = StdRng::seed_from_u64(0x5e55);
    let mut total_effects = 0;
    for seq in 0..SEQUENCES {
        let mut s = Session::new(AnchorPose::MAP_ORIGIN, Footprint::default());
        let mut ids = SequentialIds::new(seq as u64);
        let mut log = Vec::new();
        for _ in 0..rng.gen_range(1..80) {
            let fx = if rng.gen_bool(0.15) {
                s.set_mode(Mode::ALL[rng.gen_range(0..5)])
            } else {
                let hit = if !s.beacons().is_empty() && rng.gen_bool(0.5) {
                    Hit::Beacon(*s.beacons().keys().nth(rng.gen_range(0..s.beacons().len())).unwrap())
                } else {
                    Hit::Floor
                };
                let ev = PointerEvent::new(
                    PointerKind::ALL[rng.gen_range(0..4)],
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                    hit,
                );
                s.handle_pointer(&ev, &mut ids).map_err(|e| e.to_string())?
            };
            log.extend(fx);
        }
        ensure!(replay(&log) == *s.beacons(), "sequence {seq}: replay differs from session");
        total_effects += log.len();
    }
    Ok(format!(
        "{cells} cells match the transition table; {SEQUENCES} sequences ({total_effects} effects) replay exactly"
    ))
}

// ------------------------------------------------------------- persistence

fn persistence() -> Outcome {
    const OPS: usize = 10_000;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("beacons.jsonl");
    let mut rng = StdRng::seed_from_u64(0xdb);
    let mut db = Database::load(&path).map_err(|e| e.to_string())?;
    let mut model: BTreeMap<BeaconId, BeaconRecord> = BTreeMap::new();
    let mut order: Vec<BeaconId> = Vec::new();
    let (mut reloads, mut faults) = (0, 0);
    for op in 0..OPS {
        let id = BeaconId::from_u128(rng.gen_range(1..=24));
        let inject = rng.gen_bool(0.05);
        if inject {
            faults += 1;
            let debris = dir.path().join(format!(".beacons-torn{op}.tmp"));
            db.set_stage_hook(move |staged| {
                let bytes = std::fs::read(staged)?;
                std::fs::write(&debris, &bytes[..bytes.len() / 3])?;
                Err(std::io::Error::other("injected crash"))
            });
        }
        let pose = random_pose(&mut rng, Frame::RobotMap);
        let result = match rng.gen_range(0..3) {
            0 => db.add(BeaconRecord::from_pose(id, &pose)),
            1 => db.change(&id, &pose),
            _ => db.delete(&id),
        };
        db.clear_stage_hook();
        let exists = model.contains_key(&id);
        match result {
            Ok(()) => {
                ensure!(!inject, "op {op}: save succeeded despite injected crash");
                if db.contains(&id) {
                    if !exists {
                        order.push(id);
                    }
                    model.insert(id, BeaconRecord::from_pose(id, &pose));
                } else {
                    model.remove(&id);
                    order.retain(|o| *o != id);
                }
            }
            Err(StoreError::Duplicate(_)) => ensure!(exists, "op {op}: spurious duplicate"),
            Err(StoreError::NotFound(_)) => ensure!(!exists, "op {op}: spurious not-found"),
            Err(StoreError::Io { .. }) if inject => {}
            Err(e) => return Err(format!("op {op}: {e}")),
        }
        let expected: Vec<BeaconRecord> = order.iter().map(|id| model[id]).collect();
        let on_disk = Database::load(&path).map_err(|e| format!("op {op}: file unreadable: {e}"))?;
        ensure!(on_disk.records() == expected.as_slice(), "op {op}: file differs from reference");
        ensure!(db.records() == expected.as_slice(), "op {op}: memory differs from reference");
        if rng.gen_bool(0.1) {
            db = on_disk;
            reloads += 1;
        }
    }
    Ok(format!("{OPS} ops, {reloads} reloads, {faults} injected crashes, final {} records", model.len()))
}

// ------------------------------------------------------------------ bridge

fn bridge() -> Outcome {
    const FRAMES: usize = 10_000;
    let golden: Vec<u8> = {
        let mut out = vec![0x09, 0, 0, 0];
        out.extend_from_slice(b"goal_pose");
        out.extend_from_slice(&[0x38, 0, 0, 0]);
        for v in [1.5f64, -2.0, 0.0, 0.0, 0.0, 0.0, 1.0] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    };
    let goal = Pose::new(Vec3::new(1.5, -2.0, 0.0), Quat::IDENTITY, Frame::RobotMap);
    let encoded = encode_frame(TOPIC_GOAL_POSE, &encode_pose_msg(&goal).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure!(encoded.len() == 73 && encoded == golden, "goal_pose frame differs from golden bytes");

    let mut rng = StdRng::seed_from_u64(0xb1d);
    let frames: Vec<WireFrame> = (0..FRAMES)
        .map(|_| {
            let topic: String = (0..rng.gen_range(0..32)).map(|_| rng.gen_range(b'a'..=b'z') as char).collect();
            let payload: Vec<u8> = (0..rng.gen_range(0..200)).map(|_| rng.gen()).collect();
            WireFrame::new(topic, payload)
        })
        .collect();
    let mut wire = Vec::new();
    for f in &frames {
        wire.extend(encode_frame(&f.topic, &f.payload).map_err(|e| e.to_string())?);
    }
    let cuts: Vec<usize> = (0..wire.len() / 8).map(|_| rng.gen_range(1..97)).collect();

    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(async {
        // random chunk splits over a real socket
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.map_err(|e| e.to_string())?;
        let addr = listener.local_addr().map_err(|e| e.to_string())?;
        let writer = tokio::spawn(async move {
            let mut stream = tokio::net::TcpStream::connect(addr).await.unwrap();
            stream.set_nodelay(true).unwrap();
            let mut pos = 0;
            for cut in cuts.iter().cycle() {
                if pos >= wire.len() {
                    break;
                }
                let end = (pos + cut).min(wire.len());
                stream.write_all(&wire[pos..end]).await.unwrap();
                stream.flush().await.unwrap();
                pos = end;
            }
        });
        let (sock, _) = listener.accept().await.map_err(|e| e.to_string())?;
        let mut framed = tokio_util::codec::Framed::new(sock, FrameCodec);
        let mut got = Vec::with_capacity(FRAMES);
        while let Some(f) = framed.next().await {
            got.push(f.map_err(|e| e.to_string())?);
        }
        writer.await.map_err(|e| e.to_string())?;
        ensure!(got == frames, "decoded {} frames, mismatch against {FRAMES} sent", got.len());

        // loopback: endpoint to a raw robot stub
        let endpoint = Endpoint::bind("127.0.0.1:0".parse().unwrap(), EndpointConfig::default())
            .await
            .map_err(|e| e.to_string())?;
        let addr = endpoint.local_addr().map_err(|e| e.to_string())?;
        let (sink, _poses, _logs) = InboundSink::channel(16);
        let (goals, goals_rx) = goal_queue();
        let cancel = tokio_util::sync::CancellationToken::new();
        let task = tokio::spawn(endpoint.run(sink, goals_rx, cancel.clone()));
        let mut stub = tokio::net::TcpStream::connect(addr).await.map_err(|e| e.to_string())?;
        goals.send(goal);
        let mut buf = [0u8; 73];
        tokio::time::timeout(Duration::from_secs(2), stub.read_exact(&mut buf))
            .await
            .map_err(|_| "goal not delivered".to_string())?
            .map_err(|e| e.to_string())?;
        ensure!(buf[..] == golden[..], "delivered goal bytes differ");
        drop(stub);
        cancel.cancel();
        let _ = task.await;

        // the encoder side of the codec produces the same bytes
        let (a, b) = tokio::io::duplex(256);
        let mut tx = tokio_util::codec::FramedWrite::new(a, FrameCodec);
        tx.send(WireFrame::new(TOPIC_GOAL_POSE, golden[17..].to_vec())).await.map_err(|e| e.to_string())?;
        let mut rx = b;
        let mut back = [0u8; 73];
        rx.read_exact(&mut back).await.map_err(|e| e.to_string())?;
        ensure!(back[..] == golden[..], "codec encoder differs from golden bytes");
        Ok(())
    })?;
    Ok(format!(
        "{FRAMES} frames bit-exact over chunked TCP; golden 73-byte goal_pose; loopback delivery byte-identical"
    ))
}

// ------------------------------------------------------------------ navsim

fn random_cells(rng: &mut StdRng, w: usize, h: usize, density: f64) -> Vec<bool> {
    (0..w * h).map(|_| rng.gen_bool(density)).collect()
}

/// Heap-based Dijkstra over 8-connected moves without corner cutting.
fn dijkstra(g: &OccupancyGrid, s: (usize, usize), t: (usize, usize)) -> Option<f64> {
    let (w, h) = (g.width(), g.height());
    let mut dist = vec![f64::INFINITY; w * h];
    let mut heap = BinaryHeap::new();
    dist[s.1 * w + s.0] = 0.0;
    heap.push(Reverse((0u64, s.1 * w + s.0)));
    while let Some(Reverse((d_bits, u))) = heap.pop() {
        let d = f64::from_bits(d_bits);
        if d > dist[u] {
            continue;
        }
        if u == t.1 * w + t.0 {
            return Some(d);
        }
        let (c, r) = ((u % w) as i64, (u / w) as i64);
        for (dc, dr) in [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)] {
            let (nc, nr) = (c + dc, r + dr);
            if nc < 0 || nr < 0 || nc >= w as i64 || nr >= h as i64 {
                continue;
            }
            let free = |a: i64, b: i64| !g.is_occupied(a as usize, b as usize);
            if !free(nc, nr) || (dc != 0 && dr != 0 && (!free(nc, r) || !free(c, nr))) {
                continue;
            }
            let nd = d + if dc != 0 && dr != 0 { std::f64::consts::SQRT_2 } else { 1.0 };
            let v = nr as usize * w + nc as usize;
            if nd < dist[v] {
                dist[v] = nd;
                // non-negative floats order the same as their bit patterns
                heap.push(Reverse((nd.to_bits(), v)));
            }
        }
    }
    None
}

fn drive(nav: &mut Navigator, mut robot: RobotState, dt: f64) -> (RobotState, NavStatus, Vec<RobotState>) {
    let mut status = nav.status();
    let mut trace = vec![robot];
    for _ in 0..200_000 {
        if status.is_terminal() {
            break;
        }
        (robot, status) = nav.tick(robot, dt);
        trace.push(robot);
    }
    (robot, status, trace)
}

fn navsim() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x9a7);
    let (mut reachable, mut unreachable) = (0, 0);
    for i in 0..100 {
        let density = rng.gen_range(0.0..0.35);
        let mut cells = random_cells(&mut rng, 50, 50, density);
        let s = (rng.gen_range(0..50), rng.gen_range(0..50));
        let t = (rng.gen_range(0..50), rng.gen_range(0..50));
        cells[s.1 * 50 + s.0] = false;
        cells[t.1 * 50 + t.0] = false;
        let g = OccupancyGrid::from_cells(50, 50, 0.1, Vec2::new(0.0, 0.0), cells).map_err(|e| e.to_string())?;
        match (plan(&g, g.cell_center(s.0, s.1), g.cell_center(t.0, t.1)), dijkstra(&g, s, t)) {
            (Ok(path), Some(cost)) => {
                let got = path_length(&path);
                ensure!((got - cost * 0.1).abs() < 1e-9, "grid {i}: A* {got} vs Dijkstra {}", cost * 0.1);
                reachable += 1;
            }
            (Err(PlanError::NoPath), None) => unreachable += 1,
            (a, b) => return Err(format!("grid {i}: planner {:?} vs oracle {b:?}", a.map(|p| p.len()))),
        }
    }

    let open = OccupancyGrid::new(80, 40, 0.05, Vec2::new(-1.0, -1.0)).map_err(|e| e.to_string())?;
    let mut nav = Navigator::new(NavConfig::default());
    let start = RobotState::at(0.0, 0.0, 0.0);
    nav.dispatch(NavGoal { x: 2.0, y: 0.0, yaw: 0.0 }, &open, &start);
    let (end, status, _) = drive(&mut nav, start, 0.05);
    let err = ((end.x - 2.0).powi(2) + end.y.powi(2)).sqrt();
    ensure!(status == NavStatus::Succeeded, "2 m run ended {status:?}");
    ensure!(nav.elapsed() < 10.0, "2 m run took {} s simulated", nav.elapsed());
    ensure!(err <= 0.05 && end.yaw.abs() <= 5f64.to_radians(), "2 m run ended {err} m / {} rad off", end.yaw);
    let straight_time = nav.elapsed();

    let fp = Footprint::default();
    let mut agree = 0;
    for k in 0..10_000 {
        let stage = Stage::new(
            1,
            Vec2::new(1.0, 1.0),
            rng.gen_range(0.5..1.5),
            rng.gen_range(0.5..1.5),
            rng.gen_range(-3.2..3.2),
            0.0,
            DEFAULT_HEADING_TOLERANCE,
        )
        .map_err(|e| e.to_string())?;
        let (x, y, yaw) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0), rng.gen_range(-3.2..3.2));
        let (c, s) = (f64::cos(yaw), f64::sin(yaw));
        let mut dense = true;
        for i in 0..32 {
            for j in 0..32 {
                let a = (i as f64 / 31.0 - 0.5) * fp.length;
                let b = (j as f64 / 31.0 - 0.5) * fp.width;
                dense &= stage.contains(Vec2::new(x + c * a - s * b, y + s * a + c * b));
            }
        }
        let got = check_stage(&stage, &RobotState::at(x, y, yaw), &fp).inside;
        ensure!(got == dense, "pose {k} ({x}, {y}, {yaw}): check {got}, sampling {dense}");
        agree += usize::from(got);
    }

    let mut cells = vec![false; 60 * 60];
    for r in 10..50 {
        cells[r * 60 + 30] = true;
    }
    let walled = OccupancyGrid::from_cells(60, 60, 0.05, Vec2::new(0.0, 0.0), cells)
        .and_then(|g| g.inflate(OccupancyGrid::circumscribed_radius(fp.length, fp.width)))
        .map_err(|e| e.to_string())?;
    let run = || {
        let mut nav = Navigator::new(NavConfig::default());
        let r = RobotState::at(0.5, 1.5, 0.0);
        nav.dispatch(NavGoal { x: 2.5, y: 1.5, yaw: 1.0 }, &walled, &r);
        drive(&mut nav, r, 0.02)
    };
    let (a, sa, ta) = run();
    let (b, sb, tb) = run();
    ensure!(sa == NavStatus::Succeeded && sa == sb, "detour runs ended {sa:?} / {sb:?}");
    let same = ta.len() == tb.len()
        && ta.iter().zip(&tb).all(|(p, q)| {
            [p.x, p.y, p.yaw, p.v, p.w].map(f64::to_bits) == [q.x, q.y, q.yaw, q.v, q.w].map(f64::to_bits)
        });
    ensure!(same && a == b, "trajectories differ between runs");
    Ok(format!(
        "A* = Dijkstra on 100 grids ({reachable} reachable, {unreachable} not); 2 m in {straight_time:.2} s sim; \
         10000 stage poses agree ({agree} inside); {} identical steps",
        ta.len()
    ))
}

// -------------------------------------------------------------- statistics

fn brute_force_p(x: &[f64], y: &[f64]) -> f64 {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let n = d.len();
    let ranks2: Vec<u64> = d
        .iter()
        .map(|di| {
            let less = d.iter().filter(|o| o.abs() < di.abs()).count() as u64;
            let equal = d.iter().filter(|o| o.abs() == di.abs()).count() as u64;
            2 * less + equal + 1
        })
        .collect();
    let plus: u64 = d.iter().zip(&ranks2).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
    let total: u64 = ranks2.iter().sum();
    let t = plus.min(total - plus);
    let hits = (0u64..1 << n)
        .filter(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks2[i]).sum::<u64>() <= t)
        .count();
    (2.0 * hits as f64 / (1u64 << n) as f64).min(1.0)
}

#[derive(serde::Deserialize)]
struct SwFixtures {
    cases: Vec<SwCase>,
}

#[derive(serde::Deserialize)]
struct SwCase {
    name: String,
    data: Vec<f64>,
    w: f64,
}

fn statistics() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x57a7);
    let mut cases = 0;
    for n in 1..=12 {
        for _ in 0..100 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64 * 0.5).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64 * 0.5).collect();
            match wilcoxon_signed_rank(&x, &y, Alternative::TwoSided) {
                Ok(r) => {
                    let want = brute_force_p(&x, &y);
                    ensure!(r.method == WilcoxonMethod::Exact, "n={n}: method {:?}", r.method);
                    ensure!((r.p_value - want).abs() < 1e-12, "n={n}: p {} vs enumeration {want}", r.p_value);
                    cases += 1;
                }
                Err(StatsError::DegenerateSample) if x == y => {}
                Err(e) => return Err(format!("n={n}: {e}")),
            }
        }
    }
    let r = wilcoxon_signed_rank(&[2.0, 3.0, 4.0, 5.0, 6.0], &[1.0; 5], Alternative::TwoSided)
        .map_err(|e| e.to_string())?;
    ensure!(r.p_value == 0.0625, "all-positive n=5 p = {}", r.p_value);

    let fixtures: SwFixtures =
        serde_json::from_str(include_str!("../../core/tests/fixtures/shapiro_wilk.json")).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for c in &fixtures.cases {
        let got = shapiro_wilk(&c.data).map_err(|e| format!("{}: {e}", c.name))?;
        worst = worst.max((got.w - c.w).abs());
        ensure!((got.w - c.w).abs() <= 1e-3, "{}: W {} vs {}", c.name, got.w, c.w);
    }

    let alternating = |odd: i64, even: i64| {
        let r: [i64; 10] = std::array::from_fn(|i| if i % 2 == 0 { odd } else { even });
        sus_score(&SusResponse::new(&r).unwrap())
    };
    let sus = [alternating(4, 0), alternating(0, 4), alternating(3, 1)];
    ensure!(sus == [100.0, 0.0, 75.0], "SUS boundary scores {sus:?}");
    Ok(format!(
        "{cases} exact p-values equal enumeration (n<=12); n=5 p=0.0625; {} Shapiro-Wilk fixtures, max |dW| {worst:.1e}; SUS 100/0/75",
        fixtures.cases.len()
    ))
}

// --------------------------------------------------------- report fixtures

fn report_fixtures() -> Outcome {
    let report =
        compare_systems(&common::reference_fixture_events(), &common::reference_fixture_sus(), &CompareOptions::default())
            .map_err(|e| e.to_string())?;
    let text = beacon_nav::report::render_text(&report);
    let overall = |title: &str| -> Option<(String, String)> {
        let line = text.lines().skip_while(|l| *l != title).find(|l| l.starts_with("Overall"))?;
        let cells: Vec<&str> = line.split_whitespace().collect();
        Some((cells[1].to_string(), cells[2].to_string()))
    };
    let want = [
        ("Action Number", "2.95", "1.59"),
        ("Navigation Number", "2.30", "1.14"),
        ("Action Time (s)", "9.05", "15.25"),
    ];
    let mut shown = Vec::new();
    for (title, a, b) in want {
        let got = overall(title).ok_or_else(|| format!("no Overall row under {title}"))?;
        ensure!(got == (a.to_string(), b.to_string()), "{title}: got {got:?}, want ({a}, {b})");
        shown.push(format!("{}/{}", got.0, got.1));
    }
    ensure!(report.participants.len() == common::PARTICIPANTS, "{} participants", report.participants.len());
    Ok(format!("overall means {} over {} participants", shown.join(", "), report.participants.len()))
}

// -------------------------------------------------------------- end-to-end

fn end_to_end() -> Outcome {
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(async {
        let start = Instant::now();
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut config = common::test_config(dir.path());
        // real-time simulation at the default tick rate
        config.sim_speed = 1.0;
        config.tick_hz = 20.0;
        let target = (1.0, 0.5, std::f64::consts::FRAC_PI_2);
        let arrived = |s: &server::StateSnapshot| {
            let d = ((s.robot.x - target.0).powi(2) + (s.robot.y - target.1).powi(2)).sqrt();
            let yaw_err = (s.robot.yaw - target.2 + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU)
                - std::f64::consts::PI;
            d <= 0.05 && yaw_err.abs() <= 5f64.to_radians()
        };

        let srv = server::start(config.clone()).await.map_err(|e| e.to_string())?;
        let api = common::Api::new(&srv);
        let id = api.place((target.0, target.1), (target.0, target.1 + 1.0)).await;
        api.select(id).await;
        let s = api.wait_terminal(Duration::from_secs(20)).await;
        ensure!(s.nav_status == NavStatus::Succeeded, "first navigation ended {:?}", s.nav_status);
        ensure!(arrived(&s), "first navigation stopped at {:?}", s.robot);
        let first = start.elapsed();
        srv.shutdown().await;

        let srv = server::start(config).await.map_err(|e| e.to_string())?;
        let api = common::Api::new(&srv);
        let beacons = api.beacons().await;
        ensure!(beacons.len() == 1 && beacons[0].beacon.id == id, "after restart: {beacons:?}");
        ensure!(api.state().await.nav_status == NavStatus::Idle, "restarted server is not idle");
        api.mode(Mode::Select).await;
        api.pointer(PointerKind::Click, 0.0, 0.0, HitBody::Beacon(id)).await;
        let s = api.wait_terminal(Duration::from_secs(20)).await;
        ensure!(s.nav_status == NavStatus::Succeeded, "second navigation ended {:?}", s.nav_status);
        ensure!(arrived(&s), "second navigation stopped at {:?}", s.robot);
        ensure!(api.beacons().await.len() == 1, "beacon set changed");
        srv.shutdown().await;
        let total = start.elapsed();
        ensure!(total < Duration::from_secs(30), "took {total:?}");
        Ok(format!(
            "Add+Select arrived in {:.1} s; beacon persisted across restart; second Select arrived; total {:.1} s",
            first.as_secs_f64(),
            total.as_secs_f64()
        ))
    })
}

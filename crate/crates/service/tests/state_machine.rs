use proptest::prelude::*;
use qplay_service::session::{ControlCommand, Session, SessionState};
use qplay_service::SessionConfig;

fn config(max_epochs: Option<usize>, frames_per_epoch: usize) -> SessionConfig {
    let mut c = SessionConfig::default();
    c.dataset.n = 24;
    c.model.n_layers = 1;
    c.grid_resolution = 8;
    c.batch_size = 6;
    c.max_epochs = max_epochs;
    c.frames_per_epoch = frames_per_epoch;
    c
}

#[derive(Debug, Clone)]
enum Action {
    Command(ControlCommand),
    Tick,
}

fn action() -> impl Strategy<Value = Action> {
    prop_oneof![
        Just(Action::Command(ControlCommand::Start)),
        Just(Action::Command(ControlCommand::Pause)),
        Just(Action::Command(ControlCommand::StepEpoch)),
        Just(Action::Command(ControlCommand::StepBatch)),
        prop::option::of(0..4u64).prop_map(|seed| Action::Command(ControlCommand::Reset { seed })),
        (prop::option::of(-0.1..0.3f64), prop::option::of(0..10usize))
            .prop_map(|(lr, batch_size)| Action::Command(ControlCommand::UpdateHyper { lr, batch_size })),
        Just(Action::Tick),
        Just(Action::Tick),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_command_sequences_stay_well_defined(
        actions in prop::collection::vec(action(), 1..40),
        max_epochs in prop::option::of(1..3usize),
        cadence in 1..4usize,
    ) {
        let mut s = Session::new("p", config(max_epochs, cadence)).unwrap();
        let mut last = s.take_frames().pop().unwrap().order_key();
        for a in actions {
            let before = s.state();
            let params = s.trainer().params().clone();
            match a {
                Action::Command(c) => {
                    let r = s.apply(c);
                    if let ControlCommand::UpdateHyper { lr, batch_size } = c {
                        let bad = lr.is_some_and(|l| l < 0.0) || batch_size == Some(0);
                        prop_assert_eq!(r.is_err(), bad);
                    } else {
                        prop_assert!(r.is_ok());
                    }
                    match c {
                        ControlCommand::Pause if before != SessionState::Running => prop_assert_eq!(s.state(), before),
                        ControlCommand::Reset { .. } => prop_assert_eq!(s.state(), SessionState::Paused),
                        ControlCommand::StepEpoch | ControlCommand::StepBatch if before == SessionState::Finished => {
                            prop_assert_eq!(s.state(), SessionState::Finished);
                            prop_assert_eq!(&params, s.trainer().params());
                        }
                        _ => {}
                    }
                }
                Action::Tick => {
                    let moved = s.tick().unwrap();
                    prop_assert_eq!(moved, before == SessionState::Running);
                    if !moved {
                        prop_assert_eq!(&params, s.trainer().params());
                    }
                }
            }
            if let Some(m) = max_epochs {
                prop_assert!(s.trainer().epoch() <= m);
                prop_assert_eq!(s.state() == SessionState::Finished, s.trainer().epoch() == m);
            }
            let frames = s.take_frames();
            if let Some(f) = frames.last() {
                prop_assert_eq!(f.state, s.state());
            }
            for f in frames {
                prop_assert!(f.order_key() > last, "{:?} after {:?}", f.order_key(), last);
                last = f.order_key();
            }
        }
    }
}

#[test]
fn step_epoch_driven_runs_are_reproducible() {
    let run = || {
        let mut s = Session::new("r", config(None, 2)).unwrap();
        s.apply(ControlCommand::Reset { seed: Some(11) }).unwrap();
        for _ in 0..3 {
            s.apply(ControlCommand::StepEpoch).unwrap();
        }
        serde_json::to_string(&s.take_frames()).unwrap()
    };
    assert_eq!(run(), run());
}

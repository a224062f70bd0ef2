use mksys_core::gen::Gen;
use mksys_core::model::{KernelRef, ModelFile};
use mksys_core::time::StepSystem;
use mksys_core::{FiniteObject, Instance};
use proptest::prelude::*;

fn atoms_of(x: &FiniteObject) -> Vec<Vec<String>> {
    x.atoms().iter().map(|a| a.labels().to_vec()).collect()
}

/// A model holding one random system, with one object per interface part.
fn random_model(seed: u64, inst: Instance) -> (ModelFile, StepSystem) {
    let mut g = Gen::new(seed);
    let step = g.step_system(3, inst, seed % 2 == 0);
    let mut m = ModelFile::empty();
    let mut names = Vec::new();
    for (name, x) in [("S", &step.state), ("I", &step.input), ("O", &step.output)] {
        if x.is_unit() {
            names.push(vec![]);
        } else {
            m.objects.insert(name.to_string(), atoms_of(x));
            names.push(vec![name.to_string()]);
        }
    }
    let [s, i, o]: [Vec<String>; 3] = names.try_into().unwrap();
    m.put_system("sys", s, i, o, &step);
    m.system = Some("sys".into());
    m.policy = Some(KernelRef::Named("closed".into()));
    m.horizon = Some(2);
    (m, step)
}

proptest! {
    #[test]
    fn save_load_save_is_byte_identical(seed in any::<u64>(), poss in any::<bool>()) {
        let inst = if poss { Instance::Poss } else { Instance::Stoch };
        let (m, _) = random_model(seed, inst);
        let text = m.to_canonical_string();
        let loaded = ModelFile::parse(&text).unwrap();
        prop_assert_eq!(&loaded, &m);
        prop_assert_eq!(loaded.to_canonical_string(), text);
    }

    #[test]
    fn stored_systems_resolve_to_themselves(seed in any::<u64>()) {
        let (m, step) = random_model(seed, Instance::Stoch);
        prop_assert_eq!(m.step_system("sys").unwrap(), step);
        prop_assert!(m.check().iter().all(|i| i.entity == "run"));
    }
}

#[test]
fn keys_are_sorted() {
    let text = random_model(1, Instance::Stoch).0.to_canonical_string();
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn unknown_kernel_names_are_parse_errors() {
    let (mut m, _) = random_model(3, Instance::Stoch);
    m.systems.get_mut("sys").unwrap().update = KernelRef::Named("missing".into());
    let issues = m.check();
    assert!(issues.iter().any(|i| i.is_parse() && i.error.to_string().contains("unknown kernel \"missing\"")));
}

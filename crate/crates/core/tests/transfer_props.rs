//! Transfer invariants on randomized inputs: identity bit-equality,
//! convex-hull bounds for averaged rows, permutation equivariance and the
//! binary format round trip.

use rand::prelude::IndexedRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use t2t_core::tokenizer::Vocab;
use t2t_core::transfer::{transfer_embeddings, EmbeddingMatrix, Provenance};

fn random_vocab(rng: &mut ChaCha8Rng, max_pieces: usize) -> Vocab {
    let alphabet = ['a', 'b', 'c', 'd'];
    let mut entries = vec![
        ("<pad>".to_string(), 0.0),
        ("</s>".to_string(), 0.0),
        ("<unk>".to_string(), 0.0),
    ];
    let n = rng.random_range(1..=max_pieces);
    while entries.len() < 3 + n {
        let len = rng.random_range(1..=3usize);
        let piece: String = (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect();
        if entries.iter().any(|(p, _)| *p == piece) {
            continue;
        }
        let score = -rng.random_range(0.5..5.0f64);
        entries.push((piece, score));
    }
    Vocab::from_entries(entries).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> EmbeddingMatrix {
    let data: Vec<f32> = (0..rows * cols)
        .map(|_| rng.random_range(-4.0f32..4.0))
        .collect();
    EmbeddingMatrix::new(rows, cols, data).unwrap()
}

#[test]
fn identity_transfer_bit_equality_randomized() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let v = random_vocab(&mut rng, 10);
        let cols = rng.random_range(1..=8usize);
        let m = random_matrix(&mut rng, v.len(), cols);
        let (out, report) = transfer_embeddings(&v, &m, &v).unwrap();
        assert_eq!(out.data(), m.data());
        assert_eq!(report.copied, v.len());
        assert_eq!(report.averaged + report.fallback, 0);
    }
}

#[test]
fn averaged_rows_stay_in_convex_hull_on_1000_transfers() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for case in 0..1000 {
        let src = random_vocab(&mut rng, 12);
        let tgt = random_vocab(&mut rng, 12);
        let cols = rng.random_range(1..=6usize);
        let m = random_matrix(&mut rng, src.len(), cols);
        let (out, report) = transfer_embeddings(&src, &m, &tgt).unwrap();
        assert_eq!(
            report.copied + report.averaged + report.fallback,
            tgt.len()
        );
        for (tgt_id, prov) in report.provenance.iter().enumerate() {
            if let Provenance::Averaged { src_ids } = prov {
                for (col, &value) in out.row(tgt_id).iter().enumerate() {
                    let coords: Vec<f32> = src_ids
                        .iter()
                        .map(|&id| m.row(id as usize)[col])
                        .collect();
                    let lo = coords.iter().copied().fold(f32::INFINITY, f32::min);
                    let hi = coords.iter().copied().fold(f32::NEG_INFINITY, f32::max);
                    assert!(
                        value >= lo && value <= hi,
                        "case {case}: target {tgt_id} col {col}: {value} outside [{lo}, {hi}]"
                    );
                }
            }
        }
    }
}

#[test]
fn permuting_target_vocab_permutes_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..100 {
        let src = random_vocab(&mut rng, 10);
        let m = random_matrix(&mut rng, src.len(), 4);

        // Build two target vocabs with the same pieces in different orders.
        let tgt_a = random_vocab(&mut rng, 8);
        let mut entries: Vec<(String, f64)> = (0..tgt_a.len() as u32)
            .map(|id| {
                let p = tgt_a.piece(id).unwrap();
                (p.text.clone(), p.score)
            })
            .collect();
        // Swap two random positions (all pieces here are non-sentinels).
        let i = rng.random_range(0..entries.len());
        let j = rng.random_range(0..entries.len());
        entries.swap(i, j);
        let tgt_b = Vocab::from_entries(entries).unwrap();

        let (out_a, _) = transfer_embeddings(&src, &m, &tgt_a).unwrap();
        let (out_b, _) = transfer_embeddings(&src, &m, &tgt_b).unwrap();
        for id_b in 0..tgt_b.len() as u32 {
            let piece = &tgt_b.piece(id_b).unwrap().text;
            let id_a = tgt_a.piece_id(piece).unwrap();
            assert_eq!(out_b.row(id_b as usize), out_a.row(id_a as usize));
        }
    }
}

#[test]
fn transfer_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let src = random_vocab(&mut rng, 10);
    let tgt = random_vocab(&mut rng, 10);
    let m = random_matrix(&mut rng, src.len(), 5);
    let (a, ra) = transfer_embeddings(&src, &m, &tgt).unwrap();
    let (b, rb) = transfer_embeddings(&src, &m, &tgt).unwrap();
    assert_eq!(a.data(), b.data());
    assert_eq!(ra.provenance, rb.provenance);
}

#[test]
fn file_round_trip_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let dir = tempfile::tempdir().unwrap();
    for i in 0..50 {
        let rows = rng.random_range(1..=20usize);
        let cols = rng.random_range(1..=16usize);
        let m = random_matrix(&mut rng, rows, cols);
        let path = dir.path().join(format!("m{i}.emb"));
        m.write_file(&path).unwrap();
        let expected_len = 12 + 4 * rows * cols;
        assert_eq!(std::fs::metadata(&path).unwrap().len() as usize, expected_len);
        let back = EmbeddingMatrix::read_file(&path).unwrap();
        assert_eq!(back, m);
    }
}

public class Reductions {
    public static double sum(double[] a, int n) {
        double s = 0.0;
        for (int i = 0; i < n; i++) s += a[i];
        return s;
    }

    public static int isum(int[] a, int n) {
        int s = 0;
        for (int i = 0; i < n; i++) s += a[i];
        return s;
    }

    public static double dmin(double[] a, int n) {
        double m = Double.POSITIVE_INFINITY;
        for (int i = 0; i < n; i++) m = Math.min(m, a[i]);
        return m;
    }

    public static int imax(int[] a, int n) {
        int m = Integer.MIN_VALUE;
        for (int i = 0; i < n; i++) m = Math.max(m, a[i]);
        return m;
    }

    public static long lsum(long[] a, int n) {
        long s = 0L;
        for (int i = 0; i < n; i++) s += a[i];
        return s;
    }

    public static float fprod(float[] a, int n) {
        float p = 1.0f;
        for (int i = 0; i < n; i++) p *= a[i];
        return p;
    }
}
